#pragma once

#include <string>
#include <vector>

#include "pcone/cone.hpp"
#include "pcone/problem.hpp"

namespace pcone {

enum class CertificateKind { Expansion, Compression };

/// Sufficient condition used for a boundary estimate on |x| = r.
enum class Route {
    LinearRatio,      ///< |T x| >= lambda Gamma eta_r |x|
    AnnulusMinimum,   ///< |T x| >= lambda sum_i m_i m_hat_r int g_i / 2
    AnnulusMaximum,   ///< |T x| <= lambda (C_hat M_hat_r + sum_i M_i int |e_i|)
    SublinearGrowth,  ///< |T x| <= (lambda C_hat eps_r + 1/2) |x|, eps_r = max_i fhat_i(r) / r
};

struct RouteResult {
    Route route;
    double margin;   ///< dimensionless slack, > 0 iff the inequality is strict
    bool domain_ok;  ///< radius restriction for sign-changing e
};

/// Expansion (|T x| > |x|) or compression (|T x| < |x|) on the cone sphere
/// of radius r. Certificates are sufficient conditions only.
struct Certificate {
    double r = 0.0;
    CertificateKind kind = CertificateKind::Expansion;
    Route route = Route::LinearRatio;  ///< best route
    double margin = 0.0;
    bool domain_ok = true;
    std::vector<RouteResult> routes;

    bool holds() const { return domain_ok && margin > 0.0; }
};

Certificate certify_expansion(const Problem& problem, const ConeConstants& constants, double r);
Certificate certify_compression(const Problem& problem, const ConeConstants& constants, double r);

/// r / (C_hat M_hat_r + sum_i M_i int |e_i|): every smaller lambda compresses
/// the sphere of radius r.
double lambda0_bound(const Problem& problem, const ConeConstants& constants, double r);

/// r / (sum_i m_i m_hat_r int g_i / 2): every larger lambda expands the sphere
/// of radius r. Derived here from the annulus-minimum estimate; the large-lambda
/// existence statement gives no explicit constant.
double lambda_expansion_bound(const Problem& problem, const ConeConstants& constants, double r);

enum class Orientation {
    ExpandInner,  ///< expansion at r_in, compression at r_out
    CompressInner,
};

struct CertifiedAnnulus {
    double r_in;
    double r_out;
    Orientation orientation;

    bool contains(double norm) const { return norm > r_in && norm < r_out; }
    std::string predicted() const;
};

struct ExistenceReport {
    std::vector<double> radii;
    std::vector<Certificate> expansion;
    std::vector<Certificate> compression;
    std::vector<CertifiedAnnulus> annuli;
};

/// Radii rmin * 10^(k / per_decade) up to rmax (per_decade intervals per decade).
std::vector<double> log_radii(double rmin, double rmax, int per_decade);

/// Scan ascending radii; every expansion-certified radius followed by a
/// compression-certified one (or the reverse), with no certified radius in
/// between, bounds an annulus holding a fixed point. Radii certified both ways
/// are treated as ambiguous and skipped. For sign-changing e the whole closed
/// annulus must lie below delta or above Delta.
ExistenceReport existence_report(const Problem& problem, const ConeConstants& constants,
                                 const std::vector<double>& radii);

enum class Growth { Sublinear, Superlinear, Neither };

enum class Clause {
    ExistsForAllLambda,
    TwoSolutionsSmallLambda,
    ExistsSmallLambda,
    ExistsLargeLambda,
};

struct Regime {
    Growth growth = Growth::Neither;
    bool singular_at_zero = false;
    SignProfile sign = SignProfile::NonnegativeE;
    std::vector<Clause> clauses;
};

Regime classify_regime(const Problem& problem);

std::string to_string(CertificateKind kind);
std::string to_string(Route route);
std::string to_string(Orientation orientation);
std::string to_string(Growth growth);
std::string to_string(Clause clause);
std::string to_string(SignProfile sign);

}  // namespace pcone
