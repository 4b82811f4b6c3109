#include "pcone/benchmarks.hpp"

#include <algorithm>
#include <ostream>

#include "pcone/certify.hpp"
#include "pcone/cone.hpp"
#include "pcone/errors.hpp"
#include "pcone/operator.hpp"
#include "pcone/solver.hpp"

namespace pcone {

Problem benchmark_problem(double alpha, double beta, double lambda, Forcing forcing, int n_grid) {
    Problem p;
    p.n = 2;
    p.period = 1.0;
    p.lambda = lambda;
    p.n_grid = n_grid;
    for (int i = 0; i < 2; ++i) {
        p.a.push_back(PeriodicCoefficient::constant(1.0, 1.0));
        p.g.push_back(PeriodicCoefficient::constant(1.0, 1.0));
        switch (forcing) {
            case Forcing::Zero: p.e.push_back(PeriodicCoefficient::constant(1.0, 0.0)); break;
            case Forcing::Nonnegative: p.e.push_back(PeriodicCoefficient::fourier(1.0, 0.1, {0.1}, {})); break;
            case Forcing::Mixed: p.e.push_back(PeriodicCoefficient::fourier(1.0, -0.1, {0.2}, {})); break;
        }
        p.f.components.emplace_back(std::vector<PowerTerm>{{1.0, -alpha}, {1.0, beta}});
    }
    return p;
}

namespace {

struct Scenario {
    std::string name;
    double alpha;
    double beta;
    Forcing forcing;
    Clause clause;
    std::vector<double> lambdas;
    std::size_t required;
};

const std::vector<Scenario>& scenarios() {
    static const std::vector<Scenario> all = {
        {"cor1a", 0.5, 0.5, Forcing::Nonnegative, Clause::ExistsForAllLambda, {0.1, 1.0, 10.0}, 1},
        {"cor1b", 1.0, 2.0, Forcing::Nonnegative, Clause::TwoSolutionsSmallLambda, {0.01, 0.05}, 2},
        {"cor2a", 0.5, 0.5, Forcing::Mixed, Clause::ExistsLargeLambda, {5.0, 10.0}, 1},
        {"cor2b", 1.0, 2.0, Forcing::Mixed, Clause::TwoSolutionsSmallLambda, {0.005, 0.01}, 2},
    };
    return all;
}

}  // namespace

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& s : scenarios()) names.push_back(s.name);
    return names;
}

bool run_scenario(const std::string& name, std::ostream& out) {
    const auto& all = scenarios();
    const auto it = std::find_if(all.begin(), all.end(), [&](const Scenario& s) { return s.name == name; });
    if (it == all.end()) throw DomainError("unknown scenario '" + name + "'");
    const Scenario& sc = *it;

    bool ok = true;
    const Problem base = benchmark_problem(sc.alpha, sc.beta, sc.lambdas.front(), sc.forcing);
    const Regime regime = classify_regime(base);
    const bool clause_applies =
        std::find(regime.clauses.begin(), regime.clauses.end(), sc.clause) != regime.clauses.end();
    out << sc.name << " regime " << to_string(regime.growth) << (regime.singular_at_zero ? " singular " : " regular ")
        << to_string(regime.sign) << " clause " << to_string(sc.clause) << ": " << (clause_applies ? "PASS" : "FAIL")
        << '\n';
    ok = ok && clause_applies;

    const auto tables = build_tables(base);
    const ConeConstants constants = compute_constants(tables, base);
    const NystromOperator op(base, tables);
    SearchOptions search;
    search.rmin = 1e-4;
    search.rmax = 1e5;
    // forced solutions carry an h^2 truncation term in the D2 residual
    search.solve.refine_ode_check = true;

    for (double lambda : sc.lambdas) {
        const SolveReport report = find_solutions(op.with_lambda(lambda), constants, search);
        std::size_t inside = 0;
        for (const auto& s : report.solutions) inside += s.inside_annulus ? 1 : 0;
        const bool pass = inside >= sc.required;
        out << sc.name << " " << to_string(sc.clause) << " lambda=" << lambda
            << " annuli=" << report.existence.annuli.size() << " solutions=" << report.solutions.size()
            << " required=" << sc.required << ": " << (pass ? "PASS" : "FAIL") << '\n';
        for (const auto& s : report.solutions) {
            out << "  norm=" << s.norm << " ode_residual=" << s.ode_residual << " cone_margin=" << s.cone.margin;
            if (s.ode_order) out << " ode_order=" << *s.ode_order;
            out << '\n';
        }
        for (const auto& note : report.notes) out << "  note: " << note << '\n';
        ok = ok && pass;
    }
    return ok;
}

}  // namespace pcone
