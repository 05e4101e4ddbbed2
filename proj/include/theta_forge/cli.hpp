#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace theta_forge {

/// Process exit codes of the command line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailure = 1,
  kExitUsage = 2,
  kExitPrecisionUnreachable = 3,
};

/// Runs one command line (arguments after the program name) and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace theta_forge
