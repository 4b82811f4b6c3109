#include "pcone/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcone/errors.hpp"

namespace pcone {

GridFunction::GridFunction(int n, int n_grid, double period, double fill)
    : n_(n), n_grid_(n_grid), period_(period), values_(std::size_t(n) * std::size_t(n_grid), fill) {
    if (n < 1 || n_grid < 1 || !(period > 0.0)) throw DomainError("grid function needs n >= 1, N >= 1, T > 0");
}

std::vector<double> GridFunction::at(int p) const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[std::size_t(i)] = (*this)(i, p);
    return x;
}

double GridFunction::norm() const {
    double total = 0.0;
    for (int i = 0; i < n_; ++i) {
        double sup = 0.0;
        for (double v : component(i)) sup = std::max(sup, std::abs(v));
        total += sup;
    }
    return total;
}

double GridFunction::min_component_sum() const {
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n_grid_; ++p) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += (*this)(i, p);
        best = std::min(best, s);
    }
    return best;
}

double GridFunction::min_value() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

bool GridFunction::finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double distance(const GridFunction& a, const GridFunction& b) {
    if (a.dimension() != b.dimension() || a.grid_size() != b.grid_size()) {
        throw DomainError("grid functions have different shapes");
    }
    double total = 0.0;
    for (int i = 0; i < a.dimension(); ++i) {
        double sup = 0.0;
        for (int p = 0; p < a.grid_size(); ++p) sup = std::max(sup, std::abs(a(i, p) - b(i, p)));
        total += sup;
    }
    return total;
}

}  // namespace pcone
