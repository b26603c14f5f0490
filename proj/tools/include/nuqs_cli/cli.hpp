#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nuqs::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kRuntime = 1,
  kUsage = 2,
  kBoundary = 3,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace nuqs::cli
