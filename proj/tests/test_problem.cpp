#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "pcone/benchmarks.hpp"
#include "pcone/errors.hpp"
#include "pcone/problem.hpp"

using namespace pcone;

namespace {

// Brute-force extrema of phi over [lo, hi] on a dense log grid.
std::pair<double, double> sampled_range(const RadialProfile& phi, double lo, double hi, int n = 20000) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (int j = 0; j <= n; ++j) {
        const double u = lo * std::pow(hi / lo, double(j) / n);
        mn = std::min(mn, phi(u));
        mx = std::max(mx, phi(u));
    }
    return {mn, mx};
}

// Random points of the orthant annulus sigma r <= |x|_1 <= r in dimension n.
std::vector<double> random_annulus_point(std::mt19937_64& rng, int n, double r, double sigma) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& v : x) s += (v = -std::log(1.0 - u(rng)));
    const double target = r * (sigma + (1.0 - sigma) * u(rng));
    for (auto& v : x) v *= target / s;
    return x;
}

}  // namespace

TEST_CASE("radial profile basics") {
    const RadialProfile phi({{1.0, -1.0}, {1.0, 2.0}});
    CHECK(phi(1.0) == doctest::Approx(2.0));
    CHECK(phi(2.0) == doctest::Approx(4.5));
    CHECK(phi.singular_at_zero());
    CHECK(phi.unbounded_at_infinity());
    CHECK(phi.min_exponent() == -1.0);
    CHECK(phi.max_exponent() == 2.0);
    // u phi' = -1/u + 2u^2 = 0 at u = 2^{-1/3}
    REQUIRE(phi.critical_point().has_value());
    CHECK(*phi.critical_point() == doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-12));

    const RadialProfile mono({{2.0, 0.5}});
    CHECK_FALSE(mono.critical_point().has_value());
    CHECK_FALSE(mono.singular_at_zero());
    const RadialProfile bounded({{1.0, -0.5}, {3.0, 0.0}});
    CHECK_FALSE(bounded.unbounded_at_infinity());
    CHECK_FALSE(bounded.critical_point().has_value());

    const auto sc = phi.scaled(3.0, -1.0);
    CHECK(sc(2.0) == doctest::Approx(3.0 * phi(2.0) / 2.0));

    CHECK_THROWS_AS(RadialProfile({{-1.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(RadialProfile({{0.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(RadialProfile({{1.0, std::nan("")}}), DomainError);
}

TEST_CASE("exact extrema match dense sampling") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(0.1, 3.0), expo(-2.0, 3.0), rad(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const RadialProfile phi({{coef(rng), expo(rng)}, {coef(rng), expo(rng)}, {coef(rng), expo(rng)}});
        double lo = std::pow(10.0, rad(rng)), hi = std::pow(10.0, rad(rng));
        if (lo > hi) std::swap(lo, hi);
        if (hi / lo < 1.001) continue;
        const auto [mn, mx] = sampled_range(phi, lo, hi);
        const double mn_exact = phi.min_on(lo, hi), mx_exact = phi.max_on(lo, hi);
        CHECK(mn_exact <= mn * (1 + 1e-12));
        CHECK(mn_exact >= mn * (1 - 1e-6));
        CHECK(mx_exact == doctest::Approx(mx).epsilon(1e-12));
    }
}

TEST_CASE("eval_f and the singularity guard") {
    Nonlinearity f{{RadialProfile({{1.0, -1.0}}), RadialProfile({{2.0, 1.0}})}};
    const std::vector<double> x{3.0, 4.0};
    const auto v = eval_f(f, x);
    CHECK(v[0] == doctest::Approx(0.2));
    CHECK(v[1] == doctest::Approx(10.0));
    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(eval_f(f, zero), SingularityError);
    const std::vector<double> tiny{1e-11, 0.0};
    CHECK_THROWS_AS(eval_f(f, tiny), SingularityError);
}

TEST_CASE("annulus extrema bound f over random annulus points") {
    std::mt19937_64 rng(3);
    const auto p = benchmark_problem(1.0, 2.0, 0.05, Forcing::Zero);
    const double sigma = 0.8775825618903725;
    for (double r : {0.05, 0.4, 3.0, 40.0}) {
        const auto ext = annulus_extrema(p.f, r, sigma, 2);
        const double eta = eta_lower(p.f, r, sigma, 2);
        for (int j = 0; j < 500; ++j) {
            const auto x = random_annulus_point(rng, 2, r, sigma);
            const auto fx = eval_f(p.f, x);
            const double l1 = x[0] + x[1];
            for (double v : fx) {
                CHECK(v >= ext.m_hat * (1 - 1e-12));
                CHECK(v <= ext.M_hat * (1 + 1e-12));
                CHECK(v >= eta * l1 * (1 - 1e-12));
            }
        }
        // the Euclidean range is [sigma r / sqrt 2, r]
        const auto [mn, mx] = sampled_range(p.f.components[0], sigma * r / std::sqrt(2.0), r);
        CHECK(ext.m_hat == doctest::Approx(mn).epsilon(1e-6));
        CHECK(ext.M_hat == doctest::Approx(mx).epsilon(1e-12));
    }
    CHECK_THROWS_AS(annulus_extrema(p.f, -1.0, sigma, 2), DomainError);
    CHECK_THROWS_AS(annulus_extrema(p.f, 1.0, 1.5, 2), DomainError);
    CHECK_THROWS_AS(eta_lower(p.f, 0.0, sigma, 2), DomainError);
}

TEST_CASE("fhat growth") {
    const auto sub = benchmark_problem(0.5, 0.5, 1.0, Forcing::Zero);
    const auto sup = benchmark_problem(1.0, 2.0, 1.0, Forcing::Zero);
    double prev_sub = std::numeric_limits<double>::infinity(), prev_sup = 0.0;
    for (double theta : {10.0, 1e2, 1e3, 1e4}) {
        const double rs = fhat(sub.f, theta, 2)[0] / theta;
        const double rp = fhat(sup.f, theta, 2)[0] / theta;
        CHECK(rs < prev_sub);
        CHECK(rp > prev_sup);
        prev_sub = rs;
        prev_sup = rp;
    }
    CHECK(prev_sub < 0.02);
    CHECK(prev_sup > 1e3);
    // max over [1/sqrt 2, theta] includes the singular end
    CHECK(fhat(sup.f, 1.0, 2)[0] == doctest::Approx(2.0));
    CHECK(fhat(sup.f, 1.0, 2)[0] > std::sqrt(2.0) + 0.5);
    CHECK_THROWS_AS(fhat(sub.f, 0.5, 2), DomainError);
}

TEST_CASE("problem validation") {
    auto p = benchmark_problem(1.0, 2.0, 0.05, Forcing::Zero);
    CHECK_NOTHROW(p.validate());
    CHECK(p.sign_profile() == SignProfile::NonnegativeE);
    CHECK(benchmark_problem(1.0, 2.0, 0.05, Forcing::Mixed).sign_profile() == SignProfile::MixedE);

    auto q = p;
    q.n_grid = 100 + 1;
    CHECK_THROWS_AS(q.validate(), DomainError);
    q = p;
    q.lambda = -1.0;
    CHECK_THROWS_AS(q.validate(), DomainError);
    q = p;
    q.split = 1.0;
    CHECK_THROWS_AS(q.validate(), DomainError);
    q = p;
    q.a.pop_back();
    CHECK_THROWS_AS(q.validate(), DomainError);
    q = p;
    q.g[0] = PeriodicCoefficient::fourier(1.0, 0.0, {1.0}, {});
    CHECK_THROWS_AS(q.validate(), HypothesisError);
    q = p;
    q.g[1] = PeriodicCoefficient::constant(1.0, 0.0);
    CHECK_THROWS_AS(q.validate(), HypothesisError);
    // g >= 0 touching zero is fine for nonnegative e, not for mixed e
    q = p;
    q.g[0] = PeriodicCoefficient::fourier(1.0, 1.0, {1.0}, {});
    CHECK_NOTHROW(q.validate());
    q.e[0] = PeriodicCoefficient::fourier(1.0, 0.0, {0.1}, {});
    CHECK_THROWS_AS(q.validate(), HypothesisError);
    q = p;
    q.a[0] = PeriodicCoefficient::constant(2.0, 1.0);
    CHECK_THROWS_AS(q.validate(), DomainError);
}

TEST_CASE("thresholds for sign-changing forcing") {
    const double sigma = 0.8775825618903725;
    // e = 0: bound = 1 / 0.5 = 2, crossings of 1/u + u^2 = 2
    const auto p = benchmark_problem(1.0, 2.0, 0.05, Forcing::Zero);
    const auto th = thresholds_delta(p, sigma);
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    REQUIRE(th.delta.has_value());
    REQUIRE(th.Delta.has_value());
    CHECK(*th.delta == doctest::Approx(golden).epsilon(1e-10));
    CHECK(*th.Delta == doctest::Approx(std::sqrt(2.0) / sigma).epsilon(1e-10));

    // mixed forcing: bound = (0.3 + 1) / 0.5 = 2.6
    const auto m = benchmark_problem(1.0, 2.0, 0.01, Forcing::Mixed);
    CHECK(forcing_bounds(m)[0] == doctest::Approx(2.6));
    const auto tm = thresholds_delta(m, sigma);
    const double d = *tm.delta;
    CHECK(1.0 / d + d * d == doctest::Approx(2.6).epsilon(1e-10));
    CHECK(d < *tm.Delta);

    // sublinear: f is bounded below by 2 at u = 1, stays under 2.6 there
    const auto s = benchmark_problem(0.5, 0.5, 1.0, Forcing::Mixed);
    const auto ts = thresholds_delta(s, sigma);
    REQUIRE(ts.delta.has_value());
    CHECK(std::pow(*ts.delta, -0.5) + std::sqrt(*ts.delta) == doctest::Approx(2.6).epsilon(1e-10));

    // bound below the minimum of f: every radius qualifies
    auto low = s;
    low.split = 0.9;
    low.e[0] = low.e[1] = PeriodicCoefficient::constant(1.0, 0.0);
    const auto tl = thresholds_delta(low, sigma);
    CHECK(std::isinf(*tl.delta));

    // not singular: no delta
    auto reg = p;
    for (auto& c : reg.f.components) c = RadialProfile({{1.0, 2.0}});
    CHECK_FALSE(thresholds_delta(reg, sigma).delta.has_value());
    CHECK(thresholds_delta(reg, sigma).Delta.has_value());
    // bounded at infinity: no Delta
    auto bnd = p;
    for (auto& c : bnd.f.components) c = RadialProfile({{1.0, -1.0}});
    CHECK_FALSE(thresholds_delta(bnd, sigma).Delta.has_value());
}
