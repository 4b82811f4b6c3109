#include "pcone/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcone/benchmarks.hpp"
#include "pcone/certify.hpp"
#include "pcone/cone.hpp"
#include "pcone/config.hpp"
#include "pcone/errors.hpp"
#include "pcone/greens.hpp"
#include "pcone/operator.hpp"
#include "pcone/solver.hpp"

namespace pcone::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

json optional_radius(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (std::isinf(*v)) return "inf";
    return *v;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw ConfigError((dir / name).string() + ": cannot open for writing");
    return os;
}

void write_json(const fs::path& dir, const std::string& name, const json& doc) {
    auto os = open_out(dir, name);
    os << doc.dump(2) << '\n';
}

json constants_json(const ConeConstants& c) {
    return {{"m", c.m},
            {"M", c.M},
            {"sigma_i", c.sigma_i},
            {"sigma", c.sigma},
            {"Gamma", c.Gamma},
            {"C_hat", c.C_hat},
            {"int_g", c.int_g},
            {"int_abs_e", c.int_abs_e},
            {"delta", optional_radius(c.delta)},
            {"Delta", optional_radius(c.Delta)}};
}

json regime_json(const Regime& r) {
    json clauses = json::array();
    for (auto c : r.clauses) clauses.push_back(to_string(c));
    return {{"growth", to_string(r.growth)},
            {"singular_at_zero", r.singular_at_zero},
            {"sign_profile", to_string(r.sign)},
            {"clauses", clauses}};
}

json annuli_json(const std::vector<CertifiedAnnulus>& annuli) {
    json out = json::array();
    for (const auto& a : annuli) {
        out.push_back({{"r_in", a.r_in},
                       {"r_out", a.r_out},
                       {"orientation", to_string(a.orientation)},
                       {"predicted", a.predicted()}});
    }
    return out;
}

int cmd_green(const Problem& problem, const fs::path& out_dir, std::ostream& out) {
    json report = json::array();
    for (int i = 0; i < problem.n; ++i) {
        const auto table = build_green_table(problem.a[std::size_t(i)], problem.n_grid);
        const auto pos = verify_positivity(table);
        auto os = open_out(out_dir, "green_" + std::to_string(i + 1) + ".csv");
        os << "t,s,G\n";
        const int N = table.grid_size();
        const double T = table.period();
        for (int p = 0; p < N; ++p) {
            for (int q = 0; q < N; ++q) {
                os << format17(p * T / N) << ',' << format17(q * T / N) << ',' << format17(table(p, q)) << '\n';
            }
        }
        report.push_back({{"component", i + 1},
                          {"closed_form", table.closed_form()},
                          {"m", table.min()},
                          {"M", table.max()},
                          {"min_value", pos.min_value},
                          {"t_argmin", pos.t_argmin},
                          {"s_argmin", pos.s_argmin},
                          {"holds", pos.holds}});
        out << "component " << i + 1 << ": m=" << format17(table.min()) << " M=" << format17(table.max())
            << " positive=" << (pos.holds ? "true" : "false") << '\n';
    }
    write_json(out_dir, "positivity.json", {{"tables", report}});
    return kOk;
}

int cmd_certify(const Problem& problem, double rmin, double rmax, int per_decade, const fs::path& out_dir,
                std::ostream& out) {
    const auto tables = build_tables(problem);
    const auto constants = compute_constants(tables, problem);
    const auto report = existence_report(problem, constants, log_radii(rmin, rmax, per_decade));
    const auto regime = classify_regime(problem);

    auto os = open_out(out_dir, "certificates.csv");
    os << "r,expansion_margin,compression_margin,domain_ok\n";
    for (std::size_t k = 0; k < report.radii.size(); ++k) {
        const bool dom = report.expansion[k].domain_ok || report.compression[k].domain_ok;
        os << format17(report.radii[k]) << ',' << format17(report.expansion[k].margin) << ','
           << format17(report.compression[k].margin) << ',' << (dom ? 1 : 0) << '\n';
    }
    json doc = {{"constants", constants_json(constants)},
                {"regime", regime_json(regime)},
                {"lambda", problem.lambda},
                {"annuli", annuli_json(report.annuli)},
                {"note", "certificates are sufficient conditions; an empty list is not evidence of non-existence"}};
    write_json(out_dir, "report.json", doc);
    out << "certified annuli: " << report.annuli.size() << '\n';
    for (const auto& a : report.annuli) out << "  " << a.predicted() << ' ' << to_string(a.orientation) << '\n';
    return report.annuli.empty() ? kNothing : kOk;
}

int cmd_solve(const Problem& problem, const SearchOptions& search, const fs::path& out_dir, std::ostream& out) {
    const auto tables = build_tables(problem);
    const auto constants = compute_constants(tables, problem);
    const NystromOperator op(problem, tables);
    const auto report = find_solutions(op, constants, search);

    auto summary = open_out(out_dir, "summary.csv");
    summary << "norm,fp_residual,ode_residual,cone_margin\n";
    for (std::size_t k = 0; k < report.solutions.size(); ++k) {
        const auto& s = report.solutions[k];
        summary << format17(s.norm) << ',' << format17(s.fp_residual) << ',' << format17(s.ode_residual) << ','
                << format17(s.cone.margin) << '\n';
        auto os = open_out(out_dir, "solution_" + std::to_string(k + 1) + ".csv");
        os << "t";
        for (int i = 0; i < problem.n; ++i) os << ",x_" << i + 1;
        os << '\n';
        for (int p = 0; p < s.x.grid_size(); ++p) {
            os << format17(s.x.time(p));
            for (int i = 0; i < problem.n; ++i) os << ',' << format17(s.x(i, p));
            os << '\n';
        }
        out << "solution " << k + 1 << ": norm=" << format17(s.norm) << " ode_residual=" << format17(s.ode_residual)
            << '\n';
    }
    json sols = json::array();
    for (const auto& s : report.solutions) {
        sols.push_back({{"norm", s.norm},
                        {"inside_annulus", s.inside_annulus},
                        {"ode_order", s.ode_order ? json(*s.ode_order) : json(nullptr)}});
    }
    write_json(out_dir, "solve_report.json",
               {{"annuli", annuli_json(report.existence.annuli)}, {"solutions", sols}, {"notes", report.notes}});
    for (const auto& note : report.notes) out << "note: " << note << '\n';
    return report.solutions.empty() ? kNothing : kOk;
}

int cmd_sweep(const Problem& problem, double lmin, double lmax, int steps, const SearchOptions& search,
              const fs::path& out_dir, std::ostream& out) {
    const auto tables = build_tables(problem);
    const auto constants = compute_constants(tables, problem);
    const NystromOperator op(problem, tables);
    const auto table = continue_lambda(op, constants, lmin, lmax, steps, search);

    auto os = open_out(out_dir, "sweep.csv");
    os << "lambda,branch_id,norm,ode_residual\n";
    for (const auto& row : table.rows) {
        os << format17(row.lambda) << ',' << row.branch_id << ',' << format17(row.norm) << ','
           << format17(row.ode_residual) << '\n';
    }
    json events = json::array();
    for (const auto& ev : table.events) {
        events.push_back({{"kind", ev.kind == BranchEvent::Kind::Fold ? "fold" : "lost"},
                          {"lambda_before", ev.lambda_before},
                          {"lambda_after", ev.lambda_after},
                          {"branches", ev.branches}});
    }
    write_json(out_dir, "events.json", {{"events", events}});
    out << "rows: " << table.rows.size() << ", events: " << table.events.size() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Positive periodic solutions of singular second-order systems"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    double rmin = 1e-3, rmax = 1e3;
    int per_decade = 60;
    double lmin = 0.0, lmax = 0.0;
    int steps = 0;
    int jobs = 1;
    bool refine_ode = false;
    std::string scenario;

    auto* green = app.add_subcommand("green", "tabulate Green's functions and check positivity");
    green->add_option("config", config, "problem file (JSON)")->required();
    green->add_option("--out", out_dir, "output directory");

    auto* certify = app.add_subcommand("certify", "compression/expansion certificates on a radius grid");
    certify->add_option("config", config, "problem file (JSON)")->required();
    certify->add_option("--rmin", rmin, "smallest radius");
    certify->add_option("--rmax", rmax, "largest radius");
    certify->add_option("--per-decade", per_decade, "radius intervals per decade");
    certify->add_option("--out", out_dir, "output directory");

    auto* solve = app.add_subcommand("solve", "find positive periodic solutions");
    solve->add_option("config", config, "problem file (JSON)")->required();
    solve->add_option("--rmin", rmin, "smallest radius");
    solve->add_option("--rmax", rmax, "largest radius");
    solve->add_option("--jobs", jobs, "concurrent annulus solves")->check(CLI::PositiveNumber);
    solve->add_flag("--refine-ode-check", refine_ode,
                    "accept an ODE residual above 1e-6 if it decays at order >= 1.9 on the doubled grid");
    solve->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "continuation in lambda");
    sweep->add_option("config", config, "problem file (JSON)")->required();
    sweep->add_option("--lmin", lmin, "first lambda")->required();
    sweep->add_option("--lmax", lmax, "last lambda")->required();
    sweep->add_option("--steps", steps, "number of lambda values")->required();
    sweep->add_option("--rmin", rmin, "smallest radius");
    sweep->add_option("--rmax", rmax, "largest radius");
    sweep->add_option("--jobs", jobs, "concurrent annulus solves")->check(CLI::PositiveNumber);
    sweep->add_flag("--refine-ode-check", refine_ode,
                    "accept an ODE residual above 1e-6 if it decays at order >= 1.9 on the doubled grid");
    sweep->add_option("--out", out_dir, "output directory");

    auto* reproduce = app.add_subcommand("reproduce", "run a built-in two-dimensional scenario");
    reproduce->add_option("name", scenario, "cor1a | cor1b | cor2a | cor2b")
        ->required()
        ->check(CLI::IsMember(scenario_names()));

    std::vector<std::string> argv_store{"pcone"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kInput;
    }

    try {
        if (*reproduce) return run_scenario(scenario, out) ? kOk : kNothing;

        const Problem problem = load_problem(config);
        SearchOptions search;
        search.rmin = rmin;
        search.rmax = rmax;
        search.per_decade = per_decade;
        search.jobs = jobs;
        search.solve.refine_ode_check = refine_ode;
        if (*green) return cmd_green(problem, out_dir, out);
        if (*certify) return cmd_certify(problem, rmin, rmax, per_decade, out_dir, out);
        if (*solve) return cmd_solve(problem, search, out_dir, out);
        if (*sweep) return cmd_sweep(problem, lmin, lmax, steps, search, out_dir, out);
    } catch (const ConfigError& e) {
        err << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const Error& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    }
    return kInput;
}

}  // namespace pcone::cli
