#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "config.hpp"

namespace cloak::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerification = 4;

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
};

// Each command writes into config.out_dir and logs one line per file to
// `log`.  Library errors propagate as exceptions; run() maps them to exit
// codes.
CommandResult cmd_solve(const RunConfig& config, std::ostream& log);
CommandResult cmd_figure_profiles(const RunConfig& config, std::ostream& log);
CommandResult cmd_verify(const RunConfig& config, std::ostream& log);
CommandResult cmd_conformal(const RunConfig& config, std::ostream& log);

}  // namespace cloak::cli
