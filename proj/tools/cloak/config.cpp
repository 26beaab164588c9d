#include "config.hpp"

#include <charconv>
#include <cmath>

#include "cloak/conformal.hpp"
#include "cloak/errors.hpp"

namespace cloak::cli {
namespace {

struct Defaults {
  double epsilon;
  std::vector<std::string> p;
};

Defaults defaults_for(Command c) {
  switch (c) {
    case Command::solve: return {0.01, {"1"}};
    case Command::figure_profiles: return {0.01, {"1", "2", "3", "5", "8", "13", "inf"}};
    case Command::verify: return {0.1, {"2"}};
    case Command::conformal: return {0.1, {"1"}};
  }
  return {0.01, {"1"}};
}

int parse_positive_int(std::string_view text, const char* what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || v <= 0) {
    throw ValidationError(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::figure_profiles: return "figure-profiles";
    case Command::verify: return "verify";
    case Command::conformal: return "conformal";
  }
  return "?";
}

Json RunConfig::to_json() const {
  Json j;
  j["command"] = to_string(command);
  j["epsilon"] = epsilon;
  Json ps = Json::array();
  for (const auto& p : p_list) {
    if (p.is_finite()) {
      ps.push_back(p.value());
    } else {
      ps.push_back("inf");
    }
  }
  j["p"] = ps;
  j["nodes"] = nodes;
  j["grid"] = {grid_r, grid_phi};
  j["tol"] = tol;
  j["seed"] = seed;
  Json fmts = Json::array();
  if (formats.csv) fmts.push_back("csv");
  if (formats.json) fmts.push_back("json");
  if (formats.svg) fmts.push_back("svg");
  j["format"] = fmts;
  switch (command) {
    case Command::verify:
      j["n_pert"] = n_pert;
      j["amplitude"] = amplitude;
      j["sabotage"] = sabotage;
      break;
    case Command::conformal:
      j["map"] = map;
      j["rays"] = rays;
      j["points"] = points;
      break;
    default: break;
  }
  return j;
}

RunConfig resolve(Command command, const RawOptions& raw) {
  const Defaults d = defaults_for(command);
  RunConfig c;
  c.command = command;

  c.epsilon = raw.epsilon.value_or(d.epsilon);
  require(std::isfinite(c.epsilon) && c.epsilon > 0.0 && c.epsilon <= 0.5,
          "epsilon must lie in (0, 1/2]");

  for (const auto& text : raw.p.empty() ? d.p : raw.p) c.p_list.push_back(PNorm::parse(text));

  c.nodes = raw.nodes.value_or(400);
  require(c.nodes >= 3, "--nodes must be at least 3");

  if (raw.grid) {
    const std::string& g = *raw.grid;
    const auto x = g.find_first_of("xX");
    require(x != std::string::npos, "--grid expects NRxNP, got '" + g + "'");
    c.grid_r = parse_positive_int(std::string_view(g).substr(0, x), "grid radial size");
    c.grid_phi = parse_positive_int(std::string_view(g).substr(x + 1), "grid angular size");
  }
  require(c.grid_r >= 8 && c.grid_phi >= 16, "--grid needs NR >= 8 and NP >= 16");

  c.tol = raw.tol.value_or(1e-10);
  require(std::isfinite(c.tol) && c.tol > 0.0 && c.tol < 1e-2, "--tol must lie in (0, 1e-2)");

  c.seed = raw.seed.value_or(42);
  c.out_dir = raw.out.value_or(".");
  c.timestamp = raw.timestamp;

  if (!raw.format.empty()) {
    c.formats = {false, false, false};
    for (const auto& f : raw.format) {
      if (f == "csv") {
        c.formats.csv = true;
      } else if (f == "json") {
        c.formats.json = true;
      } else if (f == "svg") {
        c.formats.svg = true;
      } else {
        throw ValidationError("unknown format '" + f + "' (expected csv, json, svg)");
      }
    }
  }

  c.n_pert = raw.n_pert.value_or(20);
  require(c.n_pert >= 0, "--n-pert must be non-negative");
  c.amplitude = raw.amplitude.value_or(0.1);
  require(std::isfinite(c.amplitude) && c.amplitude >= 0.0, "--amplitude must be non-negative");
  c.sabotage = raw.sabotage;

  c.map = raw.map.value_or("sinh");
  conformal::builtin_map(c.map);  // throws with the list of names
  c.rays = raw.rays.value_or(19);
  require(c.rays >= 1, "--rays must be positive");
  c.points = raw.points.value_or(40);
  require(c.points >= 2, "--points must be at least 2");

  if (command == Command::verify || command == Command::conformal) {
    for (const auto& p : c.p_list) {
      require(command == Command::conformal || p.is_finite(),
              "verify needs finite exponents");
    }
  }
  return c;
}

}  // namespace cloak::cli
