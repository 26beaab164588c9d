#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cloak::cli {

// Parses `args` (without the program name), runs the chosen subcommand and
// returns the process exit code: 0 success, 2 invalid input, 3 solver
// failure, 4 failed verification, 1 anything else (I/O).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cloak::cli
