#include "pcone/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcone/errors.hpp"

namespace pcone {

namespace {

struct DomainWindow {
    bool nonnegative;
    std::optional<double> delta;
    std::optional<double> Delta;

    bool below(double r) const { return nonnegative || (delta && r < *delta); }
    bool above(double r) const { return nonnegative || (Delta && r > *Delta); }
    bool either(double r) const { return below(r) || above(r); }
};

DomainWindow window_for(const Problem& problem, const ConeConstants& constants) {
    const bool nonnegative = problem.sign_profile() == SignProfile::NonnegativeE;
    if (!nonnegative) {
        for (int i = 0; i < problem.n; ++i) {
            const auto gs = problem.g[std::size_t(i)].sample(problem.n_grid);
            if (!(*std::min_element(gs.begin(), gs.end()) > 0.0)) {
                throw HypothesisError("e changes sign but g_" + std::to_string(i + 1) + " is not strictly positive");
            }
        }
    }
    return {nonnegative, constants.delta, constants.Delta};
}

Certificate pick_best(double r, CertificateKind kind, std::vector<RouteResult> routes) {
    Certificate cert;
    cert.r = r;
    cert.kind = kind;
    const RouteResult* best = nullptr;
    for (const auto& rr : routes) {
        if (!best || (rr.domain_ok && !best->domain_ok) ||
            (rr.domain_ok == best->domain_ok && rr.margin > best->margin)) {
            best = &rr;
        }
    }
    cert.route = best->route;
    cert.margin = best->margin;
    cert.domain_ok = best->domain_ok;
    cert.routes = std::move(routes);
    return cert;
}

void check_radius(double r) {
    if (!(r > 0.0)) throw DomainError("certificate radius must be positive");
}

}  // namespace

Certificate certify_expansion(const Problem& problem, const ConeConstants& c, double r) {
    check_radius(r);
    const auto window = window_for(problem, c);
    const double eta = eta_lower(problem.f, r, c.sigma, problem.n);
    const auto ext = annulus_extrema(problem.f, r, c.sigma, problem.n);
    double lower = 0.0;
    for (std::size_t i = 0; i < c.m.size(); ++i) lower += c.m[i] * ext.m_hat * c.int_g[i] / 2.0;

    std::vector<RouteResult> routes;
    routes.push_back({Route::LinearRatio, problem.lambda * c.Gamma * eta - 1.0, window.either(r)});
    routes.push_back({Route::AnnulusMinimum, problem.lambda * lower / r - 1.0, window.either(r)});
    return pick_best(r, CertificateKind::Expansion, std::move(routes));
}

Certificate certify_compression(const Problem& problem, const ConeConstants& c, double r) {
    check_radius(r);
    const auto window = window_for(problem, c);
    const auto ext = annulus_extrema(problem.f, r, c.sigma, problem.n);
    const double upper = problem.lambda * (c.C_hat * ext.M_hat + c.forcing_mass());

    const double radius_floor = std::max(1.0 / c.sigma, 2.0 * problem.lambda * c.forcing_mass());
    double growth_margin = 1.0 - radius_floor / r;
    if (r >= 1.0) {
        const auto fh = fhat(problem.f, r, problem.n);
        const double eps = *std::max_element(fh.begin(), fh.end()) / r;
        growth_margin = std::min(growth_margin, 0.5 - problem.lambda * c.C_hat * eps);
    }

    std::vector<RouteResult> routes;
    routes.push_back({Route::AnnulusMaximum, 1.0 - upper / r, window.either(r)});
    routes.push_back({Route::SublinearGrowth, growth_margin, window.above(r)});
    return pick_best(r, CertificateKind::Compression, std::move(routes));
}

double lambda0_bound(const Problem& problem, const ConeConstants& c, double r) {
    check_radius(r);
    const auto ext = annulus_extrema(problem.f, r, c.sigma, problem.n);
    return r / (c.C_hat * ext.M_hat + c.forcing_mass());
}

double lambda_expansion_bound(const Problem& problem, const ConeConstants& c, double r) {
    check_radius(r);
    const auto ext = annulus_extrema(problem.f, r, c.sigma, problem.n);
    double lower = 0.0;
    for (std::size_t i = 0; i < c.m.size(); ++i) lower += c.m[i] * ext.m_hat * c.int_g[i] / 2.0;
    return r / lower;
}

std::string CertifiedAnnulus::predicted() const {
    std::ostringstream os;
    os.precision(17);
    os << "|x| in (" << r_in << ", " << r_out << ")";
    return os.str();
}

std::vector<double> log_radii(double rmin, double rmax, int per_decade) {
    if (!(rmin > 0.0) || !(rmax > rmin) || per_decade < 1) {
        throw DomainError("radius grid needs 0 < rmin < rmax and per_decade >= 1");
    }
    const double decades = std::log10(rmax / rmin);
    const int steps = std::max(1, int(std::lround(decades * per_decade)));
    std::vector<double> radii;
    radii.reserve(std::size_t(steps) + 1);
    for (int k = 0; k <= steps; ++k) radii.push_back(rmin * std::pow(rmax / rmin, double(k) / steps));
    radii.back() = rmax;
    return radii;
}

ExistenceReport existence_report(const Problem& problem, const ConeConstants& c, const std::vector<double>& radii) {
    if (!std::is_sorted(radii.begin(), radii.end())) throw DomainError("radius grid must be ascending");
    const auto window = window_for(problem, c);

    ExistenceReport report;
    report.radii = radii;
    for (double r : radii) {
        report.expansion.push_back(certify_expansion(problem, c, r));
        report.compression.push_back(certify_compression(problem, c, r));
    }

    // Last radius certified one way only, and which way.
    std::optional<std::size_t> last;
    CertificateKind last_kind = CertificateKind::Expansion;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const bool expands = report.expansion[k].holds();
        const bool compresses = report.compression[k].holds();
        if (expands == compresses) continue;
        const auto kind = expands ? CertificateKind::Expansion : CertificateKind::Compression;
        if (last && kind != last_kind) {
            const double r_in = radii[*last];
            const double r_out = radii[k];
            // The enclosed annulus must stay inside one positivity window.
            const bool closed_ok = window.nonnegative || (window.below(r_in) && window.below(r_out)) ||
                                   (window.above(r_in) && window.above(r_out));
            if (closed_ok && r_out > r_in) {
                report.annuli.push_back({r_in, r_out,
                                         last_kind == CertificateKind::Expansion ? Orientation::ExpandInner
                                                                                 : Orientation::CompressInner});
            }
        }
        last = k;
        last_kind = kind;
    }
    return report;
}

Regime classify_regime(const Problem& problem) {
    Regime regime;
    regime.sign = problem.sign_profile();
    const auto& comps = problem.f.components;
    if (comps.empty()) return regime;

    bool sublinear = true;
    bool superlinear = true;
    bool singular = true;
    bool unbounded = true;
    for (const auto& phi : comps) {
        if (phi.terms().empty()) {
            sublinear = superlinear = singular = unbounded = false;
            break;
        }
        sublinear = sublinear && phi.max_exponent() < 1.0;
        superlinear = superlinear && phi.max_exponent() > 1.0;
        singular = singular && phi.singular_at_zero();
        unbounded = unbounded && phi.unbounded_at_infinity();
    }
    regime.growth = sublinear ? Growth::Sublinear : superlinear ? Growth::Superlinear : Growth::Neither;
    regime.singular_at_zero = singular;
    if (!singular) return regime;

    if (regime.sign == SignProfile::NonnegativeE) {
        if (regime.growth == Growth::Sublinear) regime.clauses.push_back(Clause::ExistsForAllLambda);
        if (regime.growth == Growth::Superlinear) regime.clauses.push_back(Clause::TwoSolutionsSmallLambda);
        regime.clauses.push_back(Clause::ExistsSmallLambda);
    } else {
        if (regime.growth == Growth::Sublinear && unbounded) regime.clauses.push_back(Clause::ExistsLargeLambda);
        if (regime.growth == Growth::Superlinear) regime.clauses.push_back(Clause::TwoSolutionsSmallLambda);
        regime.clauses.push_back(Clause::ExistsSmallLambda);
    }
    return regime;
}

std::string to_string(CertificateKind kind) {
    return kind == CertificateKind::Expansion ? "expansion" : "compression";
}

std::string to_string(Route route) {
    switch (route) {
        case Route::LinearRatio: return "linear-ratio";
        case Route::AnnulusMinimum: return "annulus-minimum";
        case Route::AnnulusMaximum: return "annulus-maximum";
        case Route::SublinearGrowth: return "sublinear-growth";
    }
    return "unknown";
}

std::string to_string(Orientation orientation) {
    return orientation == Orientation::ExpandInner ? "expand-inner" : "compress-inner";
}

std::string to_string(Growth growth) {
    switch (growth) {
        case Growth::Sublinear: return "sublinear";
        case Growth::Superlinear: return "superlinear";
        case Growth::Neither: return "neither";
    }
    return "unknown";
}

std::string to_string(Clause clause) {
    switch (clause) {
        case Clause::ExistsForAllLambda: return "exists-for-all-lambda";
        case Clause::TwoSolutionsSmallLambda: return "two-solutions-small-lambda";
        case Clause::ExistsSmallLambda: return "exists-small-lambda";
        case Clause::ExistsLargeLambda: return "exists-large-lambda";
    }
    return "unknown";
}

std::string to_string(SignProfile sign) {
    return sign == SignProfile::NonnegativeE ? "nonnegative-e" : "mixed-e";
}

}  // namespace pcone
