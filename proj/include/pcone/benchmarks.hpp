#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pcone/problem.hpp"

namespace pcone {

/// Forcing profile for the built-in two-dimensional system.
enum class Forcing {
    Zero,         ///< e = 0
    Nonnegative,  ///< e = 0.1 + 0.1 cos(2 pi t)
    Mixed,        ///< e = -0.1 + 0.2 cos(2 pi t)
};

/// x'' + x = lambda (|x|_2^{-alpha} + |x|_2^{beta}) + lambda e(t) in two
/// components with T = 1 and g = 1.
Problem benchmark_problem(double alpha, double beta, double lambda, Forcing forcing, int n_grid = 256);

/// Names accepted by run_scenario.
std::vector<std::string> scenario_names();

/// Run a built-in scenario at its preset lambda grid and print one line per
/// (clause, lambda). Returns false if any line fails. Throws DomainError for
/// an unknown name.
bool run_scenario(const std::string& name, std::ostream& out);

}  // namespace pcone
