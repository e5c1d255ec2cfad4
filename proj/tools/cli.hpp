#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epsrb::cli {

/// Process exit codes.
enum Exit : int {
  kOk = 0,
  kViolation = 2,  ///< assumption violated, parameter out of the box, stale basis
  kFailure = 3,    ///< solver failure, greedy did not converge, online misfit too large
  kUsage = 64,     ///< malformed command line or configuration
};

/// Runs one command line (argv[0] is the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

}  // namespace epsrb::cli
