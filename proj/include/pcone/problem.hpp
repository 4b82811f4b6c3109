#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pcone/coefficient.hpp"

namespace pcone {

/// Values of the Euclidean norm below this are treated as the singularity.
inline constexpr double kSingularityGuard = 1e-10;

struct PowerTerm {
    double coeff;
    double exponent;
};

/// phi(u) = sum_j c_j u^{p_j} with every c_j > 0.
///
/// With positive coefficients u phi'(u) = sum c_j p_j u^{p_j} changes sign at
/// most once, so phi is monotone or decreasing-then-increasing. All extrema
/// below are exact up to the bisection for that single critical point.
class RadialProfile {
public:
    RadialProfile() = default;
    explicit RadialProfile(std::vector<PowerTerm> terms);

    double operator()(double u) const;
    const std::vector<PowerTerm>& terms() const { return terms_; }

    bool singular_at_zero() const;  ///< some exponent < 0
    bool unbounded_at_infinity() const;  ///< some exponent > 0
    double min_exponent() const;
    double max_exponent() const;

    /// Unique interior minimizer on (0, inf), if the profile has one.
    std::optional<double> critical_point() const;
    double min_on(double lo, double hi) const;
    double max_on(double lo, double hi) const;

    /// phi(u) * scale * u^shift as a new profile (scale > 0).
    RadialProfile scaled(double scale, double shift) const;

private:
    std::vector<PowerTerm> terms_;
};

/// f_i(x) = phi_i(|x|_2), one radial profile per component.
struct Nonlinearity {
    std::vector<RadialProfile> components;

    int dimension() const { return int(components.size()); }
};

/// Componentwise f(x). Throws SingularityError when |x|_2 < kSingularityGuard.
std::vector<double> eval_f(const Nonlinearity& f, std::span<const double> x);

enum class SignProfile { NonnegativeE, MixedE };

/// x_i'' + a_i(t) x_i = lambda g_i(t) f_i(x) + lambda e_i(t), i = 1..n.
struct Problem {
    int n = 0;
    double period = 1.0;
    std::vector<PeriodicCoefficient> a;
    std::vector<PeriodicCoefficient> g;
    std::vector<PeriodicCoefficient> e;
    Nonlinearity f;
    double lambda = 1.0;
    int n_grid = 256;
    /// Share of g f reserved to dominate a negative e.
    double split = 0.5;

    /// Nonnegative-e iff every e_i >= 0 on the problem grid.
    SignProfile sign_profile() const;
    /// Shape checks plus g >= 0 with positive integral, and g > 0 when e
    /// changes sign. Throws DomainError / HypothesisError.
    void validate() const;
};

struct AnnulusExtrema {
    double m_hat;
    double M_hat;
};

/// min and max of every f_i over the orthant annulus sigma r <= |x|_1 <= r,
/// which in terms of u = |x|_2 is exactly [sigma r / sqrt(n), r].
AnnulusExtrema annulus_extrema(const Nonlinearity& f, double r, double sigma, int n);

/// max_j min over the annulus of f_j(x) / |x|_1, so that f_j(x) >= eta |x|_1.
double eta_lower(const Nonlinearity& f, double r, double sigma, int n);

/// Per component, max of f_i over the shell 1 <= |u|_1 <= theta.
std::vector<double> fhat(const Nonlinearity& f, double theta, int n);

struct Thresholds {
    /// Largest radius below which s g_i f_i + e_i > 0 everywhere; empty when f
    /// is not singular at zero, +inf when the bound holds for every radius.
    std::optional<double> delta;
    /// R''/sigma with R'' the smallest radius beyond which the same holds;
    /// empty when f stays bounded at infinity.
    std::optional<double> Delta;
};

/// Radius thresholds keeping the operator positive for sign-changing e.
Thresholds thresholds_delta(const Problem& problem, double sigma);

/// max_t(|e_i| + 1) / (split * min_t g_i) for each component.
std::vector<double> forcing_bounds(const Problem& problem);

}  // namespace pcone
