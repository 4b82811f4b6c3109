#include <cmath>
#include <random>

#include "doctest.h"
#include "pcone/benchmarks.hpp"
#include "pcone/cone.hpp"
#include "pcone/errors.hpp"
#include "pcone/operator.hpp"

using namespace pcone;

TEST_CASE("benchmark constants match hand values") {
    const auto p = benchmark_problem(1.0, 2.0, 0.05, Forcing::Zero);
    const auto c = compute_constants(build_tables(p), p);
    const double m = std::sin(1.0) / (2.0 * (1.0 - std::cos(1.0)));
    const double M = 1.0 / (2.0 * std::sin(0.5));
    CHECK(c.m[0] == doctest::Approx(m).epsilon(1e-12));
    CHECK(c.M[1] == doctest::Approx(M).epsilon(1e-12));
    // m / M reduces to cos(kT/2)
    CHECK(std::abs(c.sigma - std::cos(0.5)) < 1e-12);
    CHECK(std::abs(c.sigma - 0.8775825619) < 1e-4);
    CHECK(std::abs(c.Gamma - m * std::cos(0.5) / 2.0) < 1e-12);
    CHECK(std::abs(c.Gamma - 0.40159) < 1e-4);
    CHECK(std::abs(c.C_hat - 2.0 * M) < 1e-12);
    CHECK(std::abs(c.C_hat - 2.08583) < 1e-4);
    CHECK(c.int_g[0] == doctest::Approx(1.0));
    CHECK(c.int_abs_e[0] == 0.0);
    CHECK(c.forcing_mass() == 0.0);
    REQUIRE(c.delta.has_value());
    REQUIRE(c.Delta.has_value());
}

TEST_CASE("constants with forcing and unequal components") {
    auto p = benchmark_problem(1.0, 2.0, 0.05, Forcing::Mixed);
    p.a[1] = PeriodicCoefficient::constant_k2(1.0, 2.0);
    p.g[1] = PeriodicCoefficient::constant(1.0, 3.0);
    const auto c = compute_constants(build_tables(p), p);
    CHECK(c.sigma_i[1] == doctest::Approx(std::cos(1.0)).epsilon(1e-12));
    CHECK(c.sigma == doctest::Approx(std::cos(1.0)).epsilon(1e-12));
    // midpoint reference; the grid rule sees the kinks of |e| only at O(h^2)
    double ref = 0.0;
    const int n = 200000;
    for (int j = 0; j < n; ++j) ref += std::abs(-0.1 + 0.2 * std::cos(2 * M_PI * (j + 0.5) / n)) / n;
    CHECK(c.int_abs_e[0] == doctest::Approx(ref).epsilon(1e-4));
    CHECK(c.forcing_mass() == doctest::Approx(c.int_abs_e[0] * (c.M[0] + c.M[1])).epsilon(1e-12));
    CHECK(c.C_hat == doctest::Approx(c.M[0] + 3.0 * c.M[1]).epsilon(1e-12));
    CHECK(c.Gamma == doctest::Approx(std::min(c.m[0] * c.sigma / 2, c.m[1] * c.sigma * 3 / 2)).epsilon(1e-12));
}

TEST_CASE("non-positive Green's function is rejected") {
    auto p = benchmark_problem(1.0, 2.0, 0.05, Forcing::Zero);
    p.a[0] = PeriodicCoefficient::constant(1.0, 3.5 * 3.5);
    CHECK_THROWS_AS(compute_constants(build_tables(p), p), PositivityAssumptionError);
    p.a[0] = PeriodicCoefficient::constant(1.0, M_PI * M_PI);
    CHECK_THROWS_AS(compute_constants(build_tables(p), p), PositivityAssumptionError);
}

TEST_CASE("table shape mismatch") {
    const auto p = benchmark_problem(1.0, 2.0, 0.05, Forcing::Zero);
    auto tables = build_tables(p);
    tables.pop_back();
    CHECK_THROWS_AS(compute_constants(tables, p), DomainError);
    auto q = p;
    q.n_grid = 64;
    CHECK_THROWS_AS(compute_constants(build_tables(q), p), DomainError);
}

TEST_CASE("cone membership") {
    const double sigma = 0.8;
    GridFunction c(2, 16, 1.0, 0.5);
    CHECK(cone_membership(c, sigma).member);
    CHECK(cone_membership(c, sigma).margin == doctest::Approx(0.2));

    GridFunction spike(2, 16, 1.0, 0.1);
    spike(0, 3) = 5.0;
    const auto sm = cone_membership(spike, sigma);
    CHECK_FALSE(sm.member);
    CHECK(sm.margin < 0.0);

    GridFunction neg(2, 16, 1.0, 1.0);
    neg(1, 4) = -1e-3;
    CHECK_FALSE(cone_membership(neg, sigma).member);

    // boundary point with sum exactly sigma |x|: inside by the slack
    GridFunction edge(1, 4, 1.0, 1.0);
    edge(0, 2) = 0.8;
    CHECK(cone_membership(edge, sigma).member);
    edge(0, 2) = 0.8 - 1e-6;
    CHECK_FALSE(cone_membership(edge, sigma).member);
}

TEST_CASE("operator maps random cone points into the cone") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto forcing : {Forcing::Zero, Forcing::Nonnegative}) {
        const auto p = benchmark_problem(1.0, 2.0, 0.05, forcing, 64);
        const auto tables = build_tables(p);
        const auto c = compute_constants(tables, p);
        const NystromOperator op(p, tables);
        for (int trial = 0; trial < 100; ++trial) {
            // positive smooth-ish random functions, then pushed into K by mixing with a constant
            GridFunction x(2, 64, 1.0);
            const double scale = std::pow(10.0, 4.0 * u(rng) - 2.0);
            for (auto& v : x.data()) v = scale * u(rng);
            const double base = x.norm();
            for (auto& v : x.data()) v += 10.0 * base;
            REQUIRE(cone_membership(x, c.sigma).member);
            const auto tx = op.apply(x);
            CHECK(cone_membership(tx, c.sigma).margin >= -1e-10);
        }
    }
}
