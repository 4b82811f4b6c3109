#pragma once

#include <span>
#include <vector>

#include "pcone/greens.hpp"
#include "pcone/grid_function.hpp"
#include "pcone/problem.hpp"

namespace pcone {

/// Nystrom discretization of
///   (T x)_i(t) = lambda int_0^T G_i(t, s) (g_i(s) f_i(x(s)) + e_i(s)) ds
/// on the shared uniform grid. Immutable once built.
class NystromOperator {
public:
    NystromOperator(Problem problem, std::vector<GreensTable> tables,
                    Quadrature rule = Quadrature::CorrectedTrapezoid);

    const Problem& problem() const { return problem_; }
    const std::vector<GreensTable>& tables() const { return tables_; }
    int dimension() const { return problem_.n; }
    int grid_size() const { return problem_.n_grid; }
    SignProfile sign_profile() const { return sign_; }

    /// Same discretization at another lambda.
    NystromOperator with_lambda(double lambda) const;

    /// g_i f_i(x) + e_i at every node. Throws SingularityError at the guard and,
    /// for sign-changing e, DomainError where split g_i f_i + e_i < 0.
    GridFunction integrand(const GridFunction& x) const;

    GridFunction apply(const GridFunction& x) const;
    /// |x - T x| in the product sup norm.
    double residual(const GridFunction& x) const;

    Quadrature rule() const { return rule_; }

    /// Quadrature weight of node q in row p for component i.
    double weight(int i, int p, int q) const {
        return step_ * tables_[std::size_t(i)](p, q) + (p == q ? diag_ : 0.0);
    }
    double g_at(int i, int q) const { return g_[std::size_t(i)][std::size_t(q)]; }
    double e_at(int i, int q) const { return e_[std::size_t(i)][std::size_t(q)]; }

    GridFunction constant(double value) const;

private:
    Problem problem_;
    std::vector<GreensTable> tables_;
    Quadrature rule_;
    SignProfile sign_;
    double step_;
    double diag_;
    std::vector<std::vector<double>> g_, e_;
};

/// Build one Green table per component on the problem grid.
std::vector<GreensTable> build_tables(const Problem& problem);

GridFunction apply_T(const Problem& problem, std::span<const GreensTable> tables, const GridFunction& x);
double fixed_point_residual(const Problem& problem, std::span<const GreensTable> tables, const GridFunction& x);

/// sup over the grid of |D2 x_i + a_i x_i - lambda (g_i f_i(x) + e_i)| with D2
/// the periodic central second difference. Independent of the Green tables.
double ode_residual(const Problem& problem, const GridFunction& x);

}  // namespace pcone
