#include "pcone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcone/errors.hpp"

namespace pcone {

double ConeConstants::forcing_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < M.size(); ++i) s += M[i] * int_abs_e[i];
    return s;
}

ConeConstants compute_constants(std::span<const GreensTable> tables, const Problem& problem) {
    problem.validate();
    if (tables.size() != std::size_t(problem.n)) throw DomainError("need one Green table per component");

    ConeConstants c;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto& table = tables[i];
        if (!table.positive()) {
            throw PositivityAssumptionError("Green's function of component " + std::to_string(i + 1) +
                                            " is not positive (min " + std::to_string(table.min()) + ")");
        }
        if (table.grid_size() != problem.n_grid) throw DomainError("Green table grid differs from problem grid");
        c.m.push_back(table.min());
        c.M.push_back(table.max());
        c.sigma_i.push_back(table.min() / table.max());

        c.int_g.push_back(periodic_integral(problem.g[i].sample(problem.n_grid), problem.period));
        auto es = problem.e[i].sample(problem.n_grid);
        for (double& v : es) v = std::abs(v);
        c.int_abs_e.push_back(periodic_integral(es, problem.period));
    }
    c.sigma = *std::min_element(c.sigma_i.begin(), c.sigma_i.end());
    c.Gamma = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.m.size(); ++i) {
        c.Gamma = std::min(c.Gamma, 0.5 * c.m[i] * c.sigma * c.int_g[i]);
        c.C_hat += c.M[i] * c.int_g[i];
    }
    const auto th = thresholds_delta(problem, c.sigma);
    c.delta = th.delta;
    c.Delta = th.Delta;
    return c;
}

ConeMembership cone_membership(const GridFunction& x, double sigma) {
    const double norm = x.norm();
    const double slack = 1e-10 * (1.0 + norm);
    const double margin = x.min_component_sum() - sigma * norm;
    const bool member = x.min_value() >= -slack && margin >= -slack;
    return {member, margin};
}

}  // namespace pcone
