#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcone::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kOk = 0,          ///< success / something found
    kNothing = 1,     ///< clean negative result or failed clause
    kNumeric = 2,     ///< numeric failure (resonance, positivity, solver)
    kInput = 3,       ///< malformed configuration or arguments
};

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// printf("%.17g")
std::string format17(double v);

}  // namespace pcone::cli
