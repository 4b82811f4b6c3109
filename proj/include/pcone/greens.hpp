#pragma once

#include <vector>

#include "pcone/coefficient.hpp"
#include "pcone/grid_function.hpp"

namespace pcone {

/// Quadrature used to discretize integrals against a Green's function.
///
/// Trapezoid is the plain composite rule on the uniform grid. Its error is
/// dominated by the derivative jump of G(t, .) at s = t, which equals 1 for
/// every coefficient a(t). CorrectedTrapezoid adds the matching Euler-Maclaurin
/// term (h^2/12) phi(t_p), lifting the rule to fourth order for smooth phi.
enum class Quadrature { Trapezoid, CorrectedTrapezoid };

/// Closed-form Green's function of x'' + k^2 x = h with periodic conditions.
/// Requires 0 < kT < pi and t, s in [0, T].
double green_constant(double k, double period, double t, double s);

struct GreenBounds {
    double m;  ///< minimum, attained on the diagonal
    double M;  ///< maximum, attained at |t - s| = T/2
};
GreenBounds green_bounds_constant(double k, double period);

struct PositivityReport {
    double min_value;
    double t_argmin;
    double s_argmin;
    bool holds;
};

/// G(t_p, s_q) tabulated on the N x N uniform grid, with its extrema.
///
/// Tables built from non-constant coefficients keep the fundamental system on
/// the 4x finer RK4 grid, so the kernel can be re-evaluated between nodes.
class GreensTable {
public:
    int grid_size() const { return n_grid_; }
    double period() const { return period_; }
    double step() const { return period_ / n_grid_; }

    double operator()(int p, int q) const { return values_[std::size_t(p) * std::size_t(n_grid_) + std::size_t(q)]; }
    const std::vector<double>& values() const { return values_; }

    /// Periodic bilinear interpolation between grid nodes.
    double interpolate(double t, double s) const;

    double min() const { return min_; }
    double max() const { return max_; }
    bool positive() const { return positive_; }
    bool closed_form() const { return closed_form_; }
    /// |det(I - Phi(T))| / (1 + |Phi(T)|_F); infinite for the closed form.
    double resonance_margin() const { return resonance_margin_; }

    int fine_size() const { return 4 * n_grid_; }
    /// Kernel at t = pf T / (4N), s = qf T / (4N).
    double fine_value(int pf, int qf) const;

private:
    friend GreensTable build_green_table(const PeriodicCoefficient& a, int n_grid);

    int n_grid_ = 0;
    double period_ = 0.0;
    std::vector<double> values_;
    double min_ = 0.0;
    double max_ = 0.0;
    bool positive_ = false;
    bool closed_form_ = false;
    double resonance_margin_ = 0.0;

    double k_ = 0.0;
    // Fundamental system on the fine grid (4N + 1 points) and the periodicity
    // correction (I - Phi(T))^{-1}.
    std::vector<double> phi1_, phi2_;
    double phi1_T_ = 0.0, dphi1_T_ = 0.0, phi2_T_ = 0.0, dphi2_T_ = 0.0;
    double inv_[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

/// Tabulate the Green's function of x'' + a(t) x = h. Positive constant a
/// with kT < pi uses the closed form; anything else integrates the
/// fundamental system with RK4 at step T/(4N). Throws ResonanceError when
/// I - Phi(T) is numerically singular. n_grid must be even and >= 16.
GreensTable build_green_table(const PeriodicCoefficient& a, int n_grid);

/// Minimum of the table plus a 4x finer spot check around the grid argmin.
/// A minimum below 1e-9 * max counts as non-positive.
PositivityReport verify_positivity(const GreensTable& table);

/// x(t_p) = integral of G(t_p, s) e(s) ds over one period.
GridFunction solve_linear_periodic(const GreensTable& table, const PeriodicCoefficient& e,
                                   Quadrature rule = Quadrature::CorrectedTrapezoid);

/// Weight added to the diagonal by the chosen rule (zero for plain trapezoid).
double diagonal_correction(Quadrature rule, double step);

}  // namespace pcone
