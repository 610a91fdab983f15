#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsindy::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kAllDiverged = 3 };

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsindy::cli
