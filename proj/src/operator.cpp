#include "pcone/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcone/errors.hpp"

namespace pcone {

NystromOperator::NystromOperator(Problem problem, std::vector<GreensTable> tables, Quadrature rule)
    : problem_(std::move(problem)), tables_(std::move(tables)), rule_(rule) {
    problem_.validate();
    if (tables_.size() != std::size_t(problem_.n)) throw DomainError("need one Green table per component");
    for (const auto& t : tables_) {
        if (t.grid_size() != problem_.n_grid) throw DomainError("Green table grid differs from problem grid");
    }
    sign_ = problem_.sign_profile();
    step_ = problem_.period / problem_.n_grid;
    diag_ = diagonal_correction(rule_, step_);
    for (int i = 0; i < problem_.n; ++i) {
        g_.push_back(problem_.g[std::size_t(i)].sample(problem_.n_grid));
        e_.push_back(problem_.e[std::size_t(i)].sample(problem_.n_grid));
    }
}

NystromOperator NystromOperator::with_lambda(double lambda) const {
    NystromOperator copy = *this;
    copy.problem_.lambda = lambda;
    return copy;
}

GridFunction NystromOperator::constant(double value) const {
    return GridFunction(problem_.n, problem_.n_grid, problem_.period, value);
}

GridFunction NystromOperator::integrand(const GridFunction& x) const {
    if (x.dimension() != problem_.n || x.grid_size() != problem_.n_grid) {
        throw DomainError("grid function shape does not match the operator");
    }
    const int n = problem_.n;
    const int N = problem_.n_grid;
    GridFunction phi(n, N, problem_.period);
    std::vector<double> point(static_cast<std::size_t>(n));
    for (int p = 0; p < N; ++p) {
        for (int i = 0; i < n; ++i) point[std::size_t(i)] = x(i, p);
        const auto fx = eval_f(problem_.f, point);
        for (int i = 0; i < n; ++i) {
            const double gf = g_at(i, p) * fx[std::size_t(i)];
            if (sign_ == SignProfile::MixedE && problem_.split * gf + e_at(i, p) < 0.0) {
                throw DomainError("split inequality fails for component " + std::to_string(i + 1) + " at t = " +
                                  std::to_string(x.time(p)) + "; iterate left the positivity region");
            }
            phi(i, p) = gf + e_at(i, p);
        }
    }
    return phi;
}

GridFunction NystromOperator::apply(const GridFunction& x) const {
    const GridFunction phi = integrand(x);
    const int n = problem_.n;
    const int N = problem_.n_grid;
    GridFunction out(n, N, problem_.period);
    for (int i = 0; i < n; ++i) {
        const auto& table = tables_[std::size_t(i)];
        const auto col = phi.component(i);
        for (int p = 0; p < N; ++p) {
            const double* row = table.values().data() + std::size_t(p) * std::size_t(N);
            double sum = 0.0;
            for (int q = 0; q < N; ++q) sum += row[q] * col[std::size_t(q)];
            out(i, p) = problem_.lambda * (step_ * sum + diag_ * col[std::size_t(p)]);
        }
    }
    return out;
}

double NystromOperator::residual(const GridFunction& x) const { return distance(x, apply(x)); }

std::vector<GreensTable> build_tables(const Problem& problem) {
    std::vector<GreensTable> tables;
    tables.reserve(problem.a.size());
    for (const auto& a : problem.a) tables.push_back(build_green_table(a, problem.n_grid));
    return tables;
}

GridFunction apply_T(const Problem& problem, std::span<const GreensTable> tables, const GridFunction& x) {
    return NystromOperator(problem, {tables.begin(), tables.end()}).apply(x);
}

double fixed_point_residual(const Problem& problem, std::span<const GreensTable> tables, const GridFunction& x) {
    return NystromOperator(problem, {tables.begin(), tables.end()}).residual(x);
}

double ode_residual(const Problem& problem, const GridFunction& x) {
    const int n = problem.n;
    const int N = x.grid_size();
    if (x.dimension() != n) throw DomainError("grid function dimension does not match the problem");
    const double h = x.step();
    std::vector<std::vector<double>> a, g, e;
    for (int i = 0; i < n; ++i) {
        a.push_back(problem.a[std::size_t(i)].sample(N));
        g.push_back(problem.g[std::size_t(i)].sample(N));
        e.push_back(problem.e[std::size_t(i)].sample(N));
    }
    double worst = 0.0;
    for (int p = 0; p < N; ++p) {
        const auto fx = eval_f(problem.f, x.at(p));
        const int prev = (p + N - 1) % N;
        const int next = (p + 1) % N;
        for (int i = 0; i < n; ++i) {
            const auto ui = std::size_t(i);
            const auto up = std::size_t(p);
            const double d2 = (x(i, next) - 2.0 * x(i, p) + x(i, prev)) / (h * h);
            const double r = d2 + a[ui][up] * x(i, p) - problem.lambda * (g[ui][up] * fx[ui] + e[ui][up]);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

}  // namespace pcone
