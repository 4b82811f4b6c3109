#pragma once

#include <string>

#include "json.hpp"
#include "pcone/problem.hpp"

namespace pcone {

/// Parse a problem document. Every failure is a ConfigError whose message
/// starts with the field path, e.g. "a[1].fourier.cos[0]: expected a number".
Problem parse_problem(const nlohmann::json& doc);
Problem load_problem(const std::string& path);

/// Inverse of parse_problem; "split" is written only when it differs from 0.5.
nlohmann::json to_json(const Problem& problem);

nlohmann::json to_json(const PeriodicCoefficient& coeff);
PeriodicCoefficient parse_coefficient(const nlohmann::json& doc, double period, const std::string& path);

}  // namespace pcone
