#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gem::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kUsageError = 2,
  kDegenerate = 3,
};

/// Runs the tool on `args` (without the program name). Everything the
/// command prints goes to `out` / `err`; artifacts go to --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gem::cli
