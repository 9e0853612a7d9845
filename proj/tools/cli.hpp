#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lipnorm::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kCapacityError = 3 };

/// Runs the tool on `args` (without the program name). Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lipnorm::cli
