#pragma once

#include <iosfwd>

namespace helmmg {

/// Exit status contract of the command-line tool.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitFailure = 1,  ///< numerical failure or failed regression
  kExitUsage = 2,
  kExitDivergence = 3,
  kExitResourceLimit = 4,
};

/// Entry point of `helmmg solve|certify|bench`. Normal output goes to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace helmmg
