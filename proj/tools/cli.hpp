#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ncd::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kBlowUp = 2,         // blow-up in `simulate`, or exclusions above budget
  kCheckFailed = 3,    // a report's built-in property check failed
};

/// Runs the tool on args (args[0] is the program name). Reports go to the
/// --out directory, progress to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncd::cli
