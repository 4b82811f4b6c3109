#include "pcone/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcone/errors.hpp"

namespace pcone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bisection in log u for a sign change of fn between lo and hi, where
/// fn(lo) and fn(hi) have opposite signs.
template <class Fn>
double log_bisect(Fn fn, double lo, double hi) {
    const bool lo_negative = fn(lo) < 0.0;
    for (int it = 0; it < 400 && hi / lo - 1.0 > 4e-16; ++it) {
        const double mid = std::sqrt(lo * hi);
        if ((fn(mid) < 0.0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || sigma > 1.0) throw DomainError("sigma must lie in (0, 1]");
}

}  // namespace

RadialProfile::RadialProfile(std::vector<PowerTerm> terms) : terms_(std::move(terms)) {
    for (const auto& term : terms_) {
        if (!(term.coeff > 0.0) || !std::isfinite(term.coeff) || !std::isfinite(term.exponent)) {
            throw DomainError("power-law terms need a positive finite coefficient and a finite exponent");
        }
    }
}

double RadialProfile::operator()(double u) const {
    double v = 0.0;
    for (const auto& term : terms_) v += term.exponent == 0.0 ? term.coeff : term.coeff * std::pow(u, term.exponent);
    return v;
}

bool RadialProfile::singular_at_zero() const { return !terms_.empty() && min_exponent() < 0.0; }

bool RadialProfile::unbounded_at_infinity() const { return !terms_.empty() && max_exponent() > 0.0; }

double RadialProfile::min_exponent() const {
    double p = kInf;
    for (const auto& term : terms_) p = std::min(p, term.exponent);
    return p;
}

double RadialProfile::max_exponent() const {
    double p = -kInf;
    for (const auto& term : terms_) p = std::max(p, term.exponent);
    return p;
}

std::optional<double> RadialProfile::critical_point() const {
    if (!(singular_at_zero() && unbounded_at_infinity())) return std::nullopt;
    auto slope = [&](double u) {
        double s = 0.0;
        for (const auto& term : terms_) {
            if (term.exponent != 0.0) s += term.coeff * term.exponent * std::pow(u, term.exponent);
        }
        return s;
    };
    double lo = 1.0, hi = 1.0;
    while (slope(lo) >= 0.0) lo *= 0.5;
    while (slope(hi) <= 0.0) hi *= 2.0;
    return log_bisect(slope, lo, hi);
}

double RadialProfile::min_on(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    double best = std::min((*this)(lo), (*this)(hi));
    if (const auto u = critical_point(); u && *u > lo && *u < hi) best = std::min(best, (*this)(*u));
    return best;
}

double RadialProfile::max_on(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    return std::max((*this)(lo), (*this)(hi));
}

RadialProfile RadialProfile::scaled(double scale, double shift) const {
    std::vector<PowerTerm> out;
    out.reserve(terms_.size());
    for (const auto& term : terms_) out.push_back({term.coeff * scale, term.exponent + shift});
    return RadialProfile(std::move(out));
}

std::vector<double> eval_f(const Nonlinearity& f, std::span<const double> x) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    const double u = std::sqrt(sq);
    if (!(u >= kSingularityGuard)) {
        throw SingularityError("|x|_2 = " + std::to_string(u) + " is inside the singularity guard");
    }
    std::vector<double> out(f.components.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.components[i](u);
    return out;
}

SignProfile Problem::sign_profile() const {
    for (const auto& ei : e) {
        for (double v : ei.sample(n_grid)) {
            if (v < 0.0) return SignProfile::MixedE;
        }
    }
    return SignProfile::NonnegativeE;
}

void Problem::validate() const {
    if (n < 1) throw DomainError("dimension n must be >= 1");
    if (!(period > 0.0)) throw DomainError("period must be positive");
    const auto un = std::size_t(n);
    if (a.size() != un || g.size() != un || e.size() != un || f.components.size() != un) {
        throw DomainError("a, g, e and f must each have n = " + std::to_string(n) + " components");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and nonnegative");
    if (n_grid < 16 || n_grid % 2 != 0) throw DomainError("grid size must be even and >= 16");
    if (!(split > 0.0 && split < 1.0)) throw DomainError("split must lie in (0, 1)");
    for (const auto* coeffs : {&a, &g, &e}) {
        for (const auto& c : *coeffs) {
            if (std::abs(c.period() - period) > 1e-14 * period) {
                throw DomainError("coefficient period differs from problem period");
            }
        }
    }
    const bool mixed = sign_profile() == SignProfile::MixedE;
    for (int i = 0; i < n; ++i) {
        const auto gs = g[std::size_t(i)].sample(n_grid);
        const double gmin = *std::min_element(gs.begin(), gs.end());
        if (gmin < 0.0) throw HypothesisError("g_" + std::to_string(i + 1) + " takes negative values");
        if (!(periodic_integral(gs, period) > 0.0)) {
            throw HypothesisError("g_" + std::to_string(i + 1) + " has zero integral");
        }
        if (mixed && !(gmin > 0.0)) {
            throw HypothesisError("e changes sign, so g_" + std::to_string(i + 1) + " must be strictly positive");
        }
    }
}

AnnulusExtrema annulus_extrema(const Nonlinearity& f, double r, double sigma, int n) {
    if (!(r > 0.0)) throw DomainError("annulus radius must be positive");
    check_sigma(sigma);
    const double lo = sigma * r / std::sqrt(double(n));
    AnnulusExtrema out{kInf, -kInf};
    for (const auto& phi : f.components) {
        out.m_hat = std::min(out.m_hat, phi.min_on(lo, r));
        out.M_hat = std::max(out.M_hat, phi.max_on(lo, r));
    }
    return out;
}

double eta_lower(const Nonlinearity& f, double r, double sigma, int n) {
    if (!(r > 0.0)) throw DomainError("annulus radius must be positive");
    check_sigma(sigma);
    const double rn = std::sqrt(double(n));
    const double lo = sigma * r / rn;
    const double mid = r / rn;
    double eta = -kInf;
    for (const auto& phi : f.components) {
        // |x|_1 <= min(sqrt(n) u, r) on the annulus slice |x|_2 = u.
        const double inner = phi.scaled(1.0 / rn, -1.0).min_on(lo, mid);
        const double outer = phi.min_on(mid, r) / r;
        eta = std::max(eta, std::min(inner, outer));
    }
    return eta;
}

std::vector<double> fhat(const Nonlinearity& f, double theta, int n) {
    if (!(theta >= 1.0)) throw DomainError("fhat needs theta >= 1");
    std::vector<double> out;
    out.reserve(f.components.size());
    for (const auto& phi : f.components) out.push_back(phi.max_on(1.0 / std::sqrt(double(n)), theta));
    return out;
}

std::vector<double> forcing_bounds(const Problem& problem) {
    std::vector<double> out;
    for (int i = 0; i < problem.n; ++i) {
        const auto es = problem.e[std::size_t(i)].sample(problem.n_grid);
        const auto gs = problem.g[std::size_t(i)].sample(problem.n_grid);
        double emax = 0.0;
        for (double v : es) emax = std::max(emax, std::abs(v) + 1.0);
        const double gmin = *std::min_element(gs.begin(), gs.end());
        out.push_back(gmin > 0.0 ? emax / (problem.split * gmin) : kInf);
    }
    return out;
}

Thresholds thresholds_delta(const Problem& problem, double sigma) {
    check_sigma(sigma);
    const auto bounds = forcing_bounds(problem);
    const bool finite_bounds = std::all_of(bounds.begin(), bounds.end(), [](double b) { return std::isfinite(b); });
    if (!finite_bounds) {
        if (problem.sign_profile() == SignProfile::MixedE) {
            throw HypothesisError("e changes sign but some g_i is not strictly positive");
        }
        return {};
    }

    const auto& comps = problem.f.components;
    const bool singular = std::all_of(comps.begin(), comps.end(), [](const auto& p) { return p.singular_at_zero(); });
    const bool blows_up =
        std::all_of(comps.begin(), comps.end(), [](const auto& p) { return p.unbounded_at_infinity(); });

    Thresholds out;
    if (singular) {
        double delta = kInf;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const auto& phi = comps[i];
            const double bound = bounds[i];
            auto gap = [&](double u) { return phi(u) - bound; };
            const auto crit = phi.critical_point();
            const double floor_value = crit ? phi(*crit) : phi(1e300);
            if (floor_value >= bound) continue;
            double lo = 1.0;
            while (gap(lo) <= 0.0) lo *= 0.5;
            double hi = crit ? std::max(*crit, lo) : lo;
            while (gap(hi) > 0.0) hi *= 2.0;
            delta = std::min(delta, log_bisect(gap, lo, hi));
        }
        out.delta = delta;
    }
    if (blows_up) {
        double u_cross = 0.0;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const auto& phi = comps[i];
            const double bound = bounds[i];
            auto gap = [&](double u) { return phi(u) - bound; };
            const auto crit = phi.critical_point();
            const double floor_value = crit ? phi(*crit) : phi(0.0);
            if (floor_value >= bound) continue;
            double lo = crit ? *crit : 1.0;
            while (!crit && gap(lo) >= 0.0) lo *= 0.5;
            double hi = std::max(lo, 1.0);
            while (gap(hi) < 0.0) hi *= 2.0;
            u_cross = std::max(u_cross, log_bisect(gap, lo, hi));
        }
        out.Delta = std::sqrt(double(problem.n)) * u_cross / sigma;
    }
    return out;
}

}  // namespace pcone
