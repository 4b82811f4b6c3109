#include "pcone/config.hpp"

#include <fstream>

#include "pcone/errors.hpp"

namespace pcone {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

const json& field(const json& doc, const std::string& key, const std::string& path) {
    if (!doc.is_object()) fail(path, "expected an object");
    const auto it = doc.find(key);
    if (it == doc.end()) fail(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t j = 0; j < v.size(); ++j) out.push_back(number(v[j], path + "[" + std::to_string(j) + "]"));
    return out;
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

std::vector<PeriodicCoefficient> coefficient_list(const json& doc, const std::string& key, int n, double period) {
    const json& list = field(doc, key, "");
    if (!list.is_array() || list.size() != std::size_t(n)) fail(key, "expected an array of n = " + std::to_string(n) + " coefficients");
    std::vector<PeriodicCoefficient> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        out.push_back(parse_coefficient(list[i], period, key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace

PeriodicCoefficient parse_coefficient(const json& doc, double period, const std::string& path) {
    if (!doc.is_object() || doc.size() != 1) fail(path, "expected exactly one of constant, fourier, samples");
    try {
        if (doc.contains("constant")) return PeriodicCoefficient::constant(period, number(doc["constant"], join(path, "constant")));
        if (doc.contains("fourier")) {
            const std::string fp = join(path, "fourier");
            const json& fd = doc["fourier"];
            const double c0 = number(field(fd, "c0", fp), join(fp, "c0"));
            std::vector<double> cs, ss;
            if (fd.contains("cos")) cs = numbers(fd["cos"], join(fp, "cos"));
            if (fd.contains("sin")) ss = numbers(fd["sin"], join(fp, "sin"));
            return PeriodicCoefficient::fourier(period, c0, std::move(cs), std::move(ss));
        }
        if (doc.contains("samples")) {
            return PeriodicCoefficient::samples(period, numbers(doc["samples"], join(path, "samples")));
        }
    } catch (const DomainError& err) {
        fail(path, err.what());
    }
    fail(path, "expected exactly one of constant, fourier, samples");
}

Problem parse_problem(const json& doc) {
    if (!doc.is_object()) fail("<root>", "expected an object");
    Problem problem;
    problem.n = integer(field(doc, "n", ""), "n");
    if (problem.n < 1) fail("n", "must be >= 1");
    problem.period = number(field(doc, "T", ""), "T");
    if (!(problem.period > 0.0)) fail("T", "must be positive");
    problem.a = coefficient_list(doc, "a", problem.n, problem.period);
    problem.g = coefficient_list(doc, "g", problem.n, problem.period);
    problem.e = coefficient_list(doc, "e", problem.n, problem.period);

    const json& f = field(doc, "f", "");
    if (!f.is_array() || f.size() != std::size_t(problem.n)) fail("f", "expected one term list per component");
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string ip = "f[" + std::to_string(i) + "]";
        if (!f[i].is_array()) fail(ip, "expected an array of {c, p} terms");
        std::vector<PowerTerm> terms;
        for (std::size_t j = 0; j < f[i].size(); ++j) {
            const std::string tp = ip + "[" + std::to_string(j) + "]";
            const double c = number(field(f[i][j], "c", tp), tp + ".c");
            const double p = number(field(f[i][j], "p", tp), tp + ".p");
            if (!(c > 0.0)) fail(tp + ".c", "coefficient must be positive");
            terms.push_back({c, p});
        }
        problem.f.components.emplace_back(std::move(terms));
    }
    problem.lambda = number(field(doc, "lambda", ""), "lambda");
    if (!(problem.lambda > 0.0)) fail("lambda", "must be positive");
    if (doc.contains("N")) problem.n_grid = integer(doc["N"], "N");
    if (doc.contains("split")) problem.split = number(doc["split"], "split");

    try {
        problem.validate();
    } catch (const Error& err) {
        fail("<problem>", err.what());
    }
    return problem;
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError(path + ": " + err.what());
    }
    return parse_problem(doc);
}

json to_json(const PeriodicCoefficient& coeff) {
    return std::visit(
        [](const auto& f) -> json {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, PeriodicCoefficient::Constant>) {
                return {{"constant", f.value}};
            } else if constexpr (std::is_same_v<F, PeriodicCoefficient::Fourier>) {
                json body = {{"c0", f.c0}};
                if (!f.cos.empty()) body["cos"] = f.cos;
                if (!f.sin.empty()) body["sin"] = f.sin;
                return {{"fourier", body}};
            } else {
                return {{"samples", f.values}};
            }
        },
        coeff.form());
}

json to_json(const Problem& problem) {
    json doc;
    doc["n"] = problem.n;
    doc["T"] = problem.period;
    for (const auto* key : {"a", "g", "e"}) doc[key] = json::array();
    for (int i = 0; i < problem.n; ++i) {
        doc["a"].push_back(to_json(problem.a[std::size_t(i)]));
        doc["g"].push_back(to_json(problem.g[std::size_t(i)]));
        doc["e"].push_back(to_json(problem.e[std::size_t(i)]));
    }
    doc["f"] = json::array();
    for (const auto& phi : problem.f.components) {
        json terms = json::array();
        for (const auto& t : phi.terms()) terms.push_back({{"c", t.coeff}, {"p", t.exponent}});
        doc["f"].push_back(terms);
    }
    doc["lambda"] = problem.lambda;
    doc["N"] = problem.n_grid;
    if (problem.split != 0.5) doc["split"] = problem.split;
    return doc;
}

}  // namespace pcone
