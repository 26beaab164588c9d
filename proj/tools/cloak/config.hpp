#pragma once

// Run configuration shared by every subcommand.  Values come from
// command-line flags, then a flat `key = value` config file, then the
// per-command defaults, in that order of precedence.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cloak/annulus.hpp"
#include "format.hpp"

namespace cloak::cli {

enum class Command { solve, figure_profiles, verify, conformal };

std::string to_string(Command c);

struct OutputFormats {
  bool csv = true;
  bool json = true;
  bool svg = true;
};

struct RunConfig {
  Command command = Command::solve;
  double epsilon = 0.01;
  std::vector<PNorm> p_list;
  int nodes = 400;
  int grid_r = 64;
  int grid_phi = 128;
  double tol = 1e-10;
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = ".";
  OutputFormats formats;
  bool timestamp = false;

  // verify
  int n_pert = 20;
  double amplitude = 0.1;
  bool sabotage = false;

  // conformal
  std::string map = "sinh";
  int rays = 19;
  int points = 40;

  // Everything except the output directory and the timestamp switch, so
  // that the echo is identical wherever the files land.
  Json to_json() const;
};

// Raw values as read from flags and the config file; unset fields fall
// back to the command defaults.
struct RawOptions {
  std::optional<double> epsilon;
  std::vector<std::string> p;
  std::optional<int> nodes;
  std::optional<std::string> grid;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> format;
  std::optional<int> n_pert;
  std::optional<double> amplitude;
  bool sabotage = false;
  std::optional<std::string> map;
  std::optional<int> rays;
  std::optional<int> points;
  bool timestamp = false;
};

// Applies defaults and validates every field.  Throws ValidationError.
RunConfig resolve(Command command, const RawOptions& raw);

}  // namespace cloak::cli
