#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pcone/cli.hpp"
#include "pcone/config.hpp"
#include "pcone/errors.hpp"

using namespace pcone;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json benchmark_doc(double lambda, double alpha, double beta, int N = 256) {
    json term_list = json::array({{{"c", 1.0}, {"p", -alpha}}, {{"c", 1.0}, {"p", beta}}});
    return {{"n", 2},
            {"T", 1.0},
            {"a", json::array({{{"constant", 1.0}}, {{"constant", 1.0}}})},
            {"g", json::array({{{"constant", 1.0}}, {{"constant", 1.0}}})},
            {"e", json::array({{{"constant", 0.0}}, {{"constant", 0.0}}})},
            {"f", json::array({term_list, term_list})},
            {"lambda", lambda},
            {"N", N}};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pcone_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const auto path = dir / "problem.json";
    std::ofstream(path) << doc.dump(2);
    return path;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string expect_error(const json& doc) {
    try {
        parse_problem(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config parses all coefficient forms") {
    auto doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["a"][1] = {{"fourier", {{"c0", 1.5}, {"cos", {0.2}}, {"sin", {0.0, 0.1}}}}};
    doc["g"][0] = {{"samples", {1.0, 2.0, 1.0, 0.5}}};
    doc["split"] = 0.3;
    const auto p = parse_problem(doc);
    CHECK(p.n == 2);
    CHECK(p.lambda == 0.5);
    CHECK(p.n_grid == 256);
    CHECK(p.split == 0.3);
    CHECK(p.a[1](0.0) == doctest::Approx(1.7));
    CHECK(p.g[0](0.25) == doctest::Approx(2.0));
    CHECK(p.f.components[1].terms()[0].exponent == -1.0);

    auto plain = benchmark_doc(0.5, 1.0, 2.0);
    plain.erase("N");
    CHECK(parse_problem(plain).n_grid == 256);
}

TEST_CASE("config round trip is field-identical") {
    auto doc = benchmark_doc(0.25, 0.5, 0.5, 64);
    doc["a"][1] = {{"fourier", {{"c0", 1.5}, {"cos", {0.2}}, {"sin", {0.0, 0.1}}}}};
    doc["e"][0] = {{"fourier", {{"c0", -0.1}, {"cos", {0.2}}}}};
    doc["g"][0] = {{"samples", {1.0, 2.0, 1.0, 0.5}}};
    const auto once = to_json(parse_problem(doc));
    CHECK(once == doc);
    CHECK(to_json(parse_problem(once)) == once);
    doc["split"] = 0.25;
    CHECK(to_json(parse_problem(doc)) == doc);
}

TEST_CASE("config errors carry the field path") {
    auto doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["a"][1] = {{"fourier", {{"c0", 1.0}, {"cos", {"x"}}}}};
    CHECK(expect_error(doc).rfind("a[1].fourier.cos", 0) == 0);

    doc = benchmark_doc(0.5, 1.0, 2.0);
    doc.erase("lambda");
    CHECK(expect_error(doc).rfind("lambda", 0) == 0);

    doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["f"][0][1]["c"] = -1.0;
    CHECK(expect_error(doc).find("f[0][1].c") == 0);

    doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["g"] = json::array({{{"constant", 1.0}}});
    CHECK(expect_error(doc).rfind("g", 0) == 0);

    doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["e"][0] = {{"constant", 0.0}, {"samples", {1, 2, 3, 4}}};
    CHECK(expect_error(doc).rfind("e[0]", 0) == 0);

    doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["n"] = 1.5;
    CHECK(expect_error(doc).rfind("n", 0) == 0);

    doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["N"] = 33;
    CHECK(expect_error(doc).rfind("<problem>", 0) == 0);

    doc = benchmark_doc(0.5, 1.0, 2.0);
    doc["g"][0] = {{"constant", -1.0}};
    CHECK(expect_error(doc).rfind("<problem>", 0) == 0);

    CHECK(expect_error(json::array()).rfind("<root>", 0) == 0);
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), ConfigError);
}

TEST_CASE("format17") {
    CHECK(cli::format17(0.1) == "0.10000000000000001");
    CHECK(cli::format17(2.0) == "2");
    CHECK(std::stod(cli::format17(M_PI)) == M_PI);
}

TEST_CASE("argument errors exit 3") {
    CHECK(run({}).code == cli::kInput);
    CHECK(run({"bogus"}).code == cli::kInput);
    CHECK(run({"green"}).code == cli::kInput);
    CHECK(run({"reproduce", "cor9"}).code == cli::kInput);
    CHECK(run({"--help"}).code == cli::kOk);
    const auto dir = scratch("args");
    const auto cfg = write_config(dir, benchmark_doc(0.05, 1.0, 2.0, 32));
    CHECK(run({"sweep", cfg.string(), "--lmin", "1"}).code == cli::kInput);
    CHECK(run({"solve", cfg.string(), "--jobs", "0"}).code == cli::kInput);
    std::ofstream(dir / "broken.json") << "{ \"n\": 2, ";
    const auto broken = run({"green", (dir / "broken.json").string()});
    CHECK(broken.code == cli::kInput);
    CHECK(broken.err.find("broken.json") != std::string::npos);
}

TEST_CASE("green command") {
    const auto dir = scratch("green");
    const auto cfg = write_config(dir, benchmark_doc(0.05, 1.0, 2.0, 20));
    const auto r = run({"green", cfg.string(), "--out", (dir / "out").string()});
    REQUIRE(r.code == cli::kOk);
    const auto rows = lines(dir / "out" / "green_1.csv");
    REQUIRE(rows.size() == 1 + 20 * 20);
    CHECK(rows[0] == "t,s,G");
    // t = s = 0.3 is node 6
    const auto& row = rows[1 + 6 * 20 + 6];
    CHECK(row.rfind("0.29999999999999999,0.29999999999999999,", 0) == 0);
    const double g = std::stod(row.substr(row.rfind(',') + 1));
    CHECK(g == doctest::Approx(0.9152438608).epsilon(1e-10));
    const auto pos = json::parse(slurp(dir / "out" / "positivity.json"));
    CHECK(pos["tables"][1]["holds"] == true);

    auto bad = benchmark_doc(0.05, 1.0, 2.0, 32);
    bad["a"][0] = {{"constant", 4.0 * M_PI * M_PI}};
    const auto cfg2 = write_config(scratch("green_resonant"), bad);
    const auto rr = run({"green", cfg2.string(), "--out", (dir / "res").string()});
    CHECK(rr.code == cli::kNumeric);
    CHECK(rr.err.find("resonant") != std::string::npos);

    auto bad3 = benchmark_doc(0.05, 1.0, 2.0);
    bad3["a"][0] = {{"fourier", {{"c0", "one"}}}};
    const auto cfg3 = write_config(scratch("green_bad"), bad3);
    const auto r3 = run({"green", cfg3.string()});
    CHECK(r3.code == cli::kInput);
    CHECK(r3.err.find("a[0].fourier.c0") != std::string::npos);
}

TEST_CASE("certify command") {
    const auto dir = scratch("certify");
    const auto run_certify = [&](double lambda, double alpha, double beta) {
        const auto cfg = write_config(dir, benchmark_doc(lambda, alpha, beta));
        return run({"certify", cfg.string(), "--out", (dir / "out").string()});
    };
    CHECK(run_certify(0.05, 1.0, 2.0).code == cli::kOk);
    const auto rep = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(rep["annuli"].size() == 2);
    CHECK(rep["regime"]["clauses"][0] == "two-solutions-small-lambda");
    CHECK(rep["constants"]["sigma"].get<double>() == doctest::Approx(std::cos(0.5)));
    CHECK(rep["constants"]["delta"].is_number());
    const auto rows = lines(dir / "out" / "certificates.csv");
    CHECK(rows[0] == "r,expansion_margin,compression_margin,domain_ok");
    CHECK(rows.size() == 1 + 361);

    CHECK(run_certify(10.0, 1.0, 2.0).code == cli::kNothing);
    CHECK(json::parse(slurp(dir / "out" / "report.json"))["annuli"].empty());
    CHECK(run_certify(1.0, 0.5, 0.5).code == cli::kOk);
    // delta is absent for a regular nonlinearity
    auto reg = benchmark_doc(1.0, 0.5, 0.5);
    reg["f"][0] = json::array({{{"c", 1.0}, {"p", 0.5}}});
    reg["f"][1] = reg["f"][0];
    const auto cfg = write_config(dir, reg);
    run({"certify", cfg.string(), "--out", (dir / "reg").string()});
    CHECK(json::parse(slurp(dir / "reg" / "report.json"))["constants"]["delta"].is_null());
}

TEST_CASE("solve command writes one file per solution and is deterministic") {
    const auto dir = scratch("solve");
    const auto cfg = write_config(dir, benchmark_doc(0.05, 1.0, 2.0));
    REQUIRE(run({"solve", cfg.string(), "--out", (dir / "a").string()}).code == cli::kOk);
    REQUIRE(run({"solve", cfg.string(), "--out", (dir / "b").string(), "--jobs", "2"}).code == cli::kOk);
    for (const char* name : {"summary.csv", "solution_1.csv", "solution_2.csv", "solve_report.json"}) {
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
    CHECK_FALSE(fs::exists(dir / "a" / "solution_3.csv"));
    const auto sol = lines(dir / "a" / "solution_1.csv");
    REQUIRE(sol.size() == 257);
    CHECK(sol[0] == "t,x_1,x_2");
    CHECK(sol[5].substr(sol[5].find(',') + 1, 6) == "0.1898");
    CHECK(lines(dir / "a" / "solution_2.csv")[9].find(",9.99") != std::string::npos);
    CHECK(lines(dir / "a" / "summary.csv")[0] == "norm,fp_residual,ode_residual,cone_margin");

    const auto none = write_config(dir, benchmark_doc(10.0, 1.0, 2.0));
    CHECK(run({"solve", none.string(), "--out", (dir / "c").string()}).code == cli::kNothing);
    CHECK(lines(dir / "c" / "summary.csv").size() == 1);
}

TEST_CASE("sweep command") {
    const auto dir = scratch("sweep");
    const auto cfg = write_config(dir, benchmark_doc(1.0, 0.5, 0.5, 64));
    REQUIRE(run({"sweep", cfg.string(), "--lmin", "0.1", "--lmax", "10", "--steps", "5", "--rmin", "1e-4", "--rmax",
                 "1e5", "--out", (dir / "s").string()})
                .code == cli::kOk);
    const auto rows = lines(dir / "s" / "sweep.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "lambda,branch_id,norm,ode_residual");
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].find(",0,") != std::string::npos);

    REQUIRE(run({"sweep", cfg.string(), "--lmin", "0.1", "--lmax", "10", "--steps", "0", "--out",
                 (dir / "z").string()})
                .code == cli::kOk);
    CHECK(lines(dir / "z" / "sweep.csv") == std::vector<std::string>{"lambda,branch_id,norm,ode_residual"});
    CHECK(json::parse(slurp(dir / "z" / "events.json"))["events"].empty());

    CHECK(run({"sweep", cfg.string(), "--lmin", "0", "--lmax", "10", "--steps", "3", "--out", (dir / "e").string()})
              .code == cli::kNumeric);
}

TEST_CASE("ODE check flag") {
    const auto dir = scratch("odeflag");
    auto doc = benchmark_doc(10.0, 0.5, 0.5);
    doc["e"][0] = doc["e"][1] = {{"fourier", {{"c0", 0.1}, {"cos", {0.1}}}}};
    const auto cfg = write_config(dir, doc);
    CHECK(run({"solve", cfg.string(), "--rmin", "1e-4", "--rmax", "1e5", "--out", (dir / "a").string()}).code ==
          cli::kNothing);
    const auto r = run({"solve", cfg.string(), "--rmin", "1e-4", "--rmax", "1e5", "--refine-ode-check", "--out",
                        (dir / "b").string()});
    CHECK(r.code == cli::kOk);
    CHECK(lines(dir / "b" / "summary.csv").size() == 2);
}

TEST_CASE("reproduce command") {
    const auto r = run({"reproduce", "cor1b"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("lambda=0.05") != std::string::npos);
}

#ifdef PCONE_CLI_PATH
TEST_CASE("executable exit codes") {
    const std::string exe = PCONE_CLI_PATH;
    CHECK(WEXITSTATUS(std::system((exe + " reproduce cor2b > /dev/null").c_str())) == 0);
    CHECK(WEXITSTATUS(std::system((exe + " nosuch 2> /dev/null").c_str())) == 3);
}
#endif
