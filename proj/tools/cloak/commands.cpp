#include "commands.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cloak/conformal.hpp"
#include "cloak/polar_grid.hpp"
#include "cloak/radial.hpp"
#include "cloak/variational.hpp"

namespace cloak::cli {
namespace {

using radial::AmplitudeProfile;
using variational::lift_arg;
using variational::lift_profile;
using variational::PolarGrid;

std::string p_label(const PNorm& p) { return p.is_finite() ? p.to_string() : "inf"; }

Json p_json(const PNorm& p) { return p.is_finite() ? Json(p.value()) : Json("inf"); }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

AmplitudeProfile profile_for(const AnnulusSpec& spec, const PNorm& p, const RunConfig& c) {
  if (!p.is_finite()) return radial::profile_minimax(spec, c.nodes);
  return radial::solve_optimal_profile(spec, p.value(), c.nodes, c.tol);
}

class Writer {
 public:
  Writer(const RunConfig& c, std::ostream& log, CommandResult& result)
      : config_(c), log_(log), result_(result) {
    std::filesystem::create_directories(c.out_dir);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = config_.out_dir / name;
    write_atomic(path, content);
    result_.files.push_back(path);
    log_ << "wrote " << path.string() << '\n';
  }

  void csv(const std::string& name, CsvTable table) {
    table.add_comment("schema_version", std::string(kSchemaVersion));
    table.add_comment("config", config_.to_json().dump());
    write(name, table.str());
  }

  void json(const std::string& name, const Json& results) {
    write(name, make_envelope(config_.to_json(), results, config_.timestamp).dump(2) + '\n');
  }

  std::string metadata() const {
    Json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["config"] = config_.to_json();
    return meta.dump();
  }

 private:
  const RunConfig& config_;
  std::ostream& log_;
  CommandResult& result_;
};


}  // namespace

// ---------------------------------------------------------------------------

CommandResult cmd_solve(const RunConfig& c, std::ostream& log) {
  CommandResult result;
  Writer out(c, log, result);
  const AnnulusSpec spec(c.epsilon);
  Json blocks = Json::array();

  for (const auto& p : c.p_list) {
    const auto profile = profile_for(spec, p, c);
    const auto nodes = profile.nodes();
    const auto values = profile.values();
    const auto slopes = profile.slopes();

    if (c.formats.csv) {
      CsvTable table({"r", "f", "fprime", "trace"});
      for (std::size_t i = 0; i < profile.size(); ++i) {
        table.row().cell(nodes[i]).cell(values[i]).cell(slopes[i]).cell(
            radial_trace(nodes[i], slopes[i]));
      }
      out.csv("profile_eps" + format_real(c.epsilon) + "_p" + p_label(p) + ".csv",
              std::move(table));
    }

    Json block;
    block["p"] = p_json(p);
    block["kind"] = radial::to_string(profile.kind());
    block["shooting_constant"] = optional_json(profile.shooting_constant());
    Json energies;
    if (p.is_finite()) {
      const auto e = radial::energy_p(profile, p.value());
      energies["I_p"] = e.value;
      energies["I_p_error_estimate"] = e.quadrature_error_estimate;
    }
    energies["I_inf"] = radial::energy_inf(profile).value;
    block["energies"] = energies;
    block["el_residual"] = p.is_finite() ? Json(radial::el_residual(profile, p.value())) : Json();
    block["f_at_eps"] = values.front();
    block["f_at_1"] = values.back();
    blocks.push_back(block);
  }
  if (c.formats.json) {
    out.json("solve_eps" + format_real(c.epsilon) + ".json", Json{{"profiles", blocks}});
  }
  return result;
}

// ---------------------------------------------------------------------------

CommandResult cmd_figure_profiles(const RunConfig& c, std::ostream& log) {
  CommandResult result;
  Writer out(c, log, result);
  const AnnulusSpec spec(c.epsilon);

  struct Curve {
    std::string name;
    AmplitudeProfile profile;
  };
  std::vector<Curve> curves;
  curves.push_back({"f_ra", radial::profile_affine(spec, c.nodes)});
  for (const auto& p : c.p_list) curves.push_back({"f_" + p_label(p), profile_for(spec, p, c)});

  if (c.formats.csv) {
    CsvTable table({"curve", "r", "f", "fprime"});
    for (const auto& curve : curves) {
      const auto nodes = curve.profile.nodes();
      const auto values = curve.profile.values();
      const auto slopes = curve.profile.slopes();
      for (std::size_t i = 0; i < curve.profile.size(); ++i) {
        table.row().cell(curve.name).cell(nodes[i]).cell(values[i]).cell(slopes[i]);
      }
    }
    out.csv("profiles_eps" + format_real(c.epsilon) + ".csv", std::move(table));
  }

  if (c.formats.json) {
    Json summary = Json::array();
    for (const auto& curve : curves) {
      const auto values = curve.profile.values();
      summary.push_back({{"curve", curve.name},
                         {"kind", radial::to_string(curve.profile.kind())},
                         {"f_at_eps", values.front()},
                         {"f_at_1", values.back()},
                         {"I_inf", radial::energy_inf(curve.profile).value}});
    }
    out.json("profiles_eps" + format_real(c.epsilon) + ".json", Json{{"curves", summary}});
  }

  if (c.formats.svg) {
    SvgDocument svg(680, 480);
    svg.add_metadata(out.metadata());
    const SvgDocument::Panel panel{80, 40, 440, 370, 0.0, 1.0, -0.75, 0.05};
    svg.axes(panel, "r", "f(r)");
    svg.text(300, 24, "logarithmic amplitudes, eps = " + format_real(c.epsilon), 14);
    const std::size_t n_optimal = curves.size() - 1;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      const auto& profile = curves[k].profile;
      std::vector<Vec2> pts;
      for (std::size_t i = 0; i < profile.size(); ++i) {
        pts.push_back({profile.nodes()[i], profile.values()[i]});
      }
      const bool dashed = k == 0;
      const double t = n_optimal > 1 ? double(k - 1) / double(n_optimal - 1) : 0.0;
      const std::string color = dashed ? "#000000" : ramp_color(t);
      svg.polyline(panel, pts, color, 1.5, dashed ? "6,4" : "");
      const double ly = 60 + 20.0 * k;
      svg.line(540, ly, 570, ly, color, 1.5, false, dashed ? "6,4" : "");
      svg.text(580, ly + 4, curves[k].name, 12, "start");
    }
    out.write("profiles_eps" + format_real(c.epsilon) + ".svg", svg.str());
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

// Slopes bent by a smooth factor and rescaled so the trapezoid integral is
// still log 2: admissible, but no longer a critical point.
AmplitudeProfile sabotaged(const AmplitudeProfile& f) {
  const double eps = f.epsilon();
  std::vector<double> nodes(f.nodes().begin(), f.nodes().end());
  std::vector<double> slopes(f.slopes().begin(), f.slopes().end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    slopes[i] *= 1.0 + 0.2 * std::sin(std::numbers::pi * (nodes[i] - eps) / (1.0 - eps));
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    integral += 0.5 * (slopes[i] + slopes[i - 1]) * (nodes[i] - nodes[i - 1]);
  }
  for (double& s : slopes) s *= std::numbers::ln2 / integral;
  return AmplitudeProfile::custom(eps, std::move(nodes), std::move(slopes));
}

// A component converges if it shrinks by this factor per refinement, or
// if it already sits at the rounding floor on both levels.
constexpr double kRefinementFactor = 1.8;
constexpr double kRoundingFloor = 1e-9;

bool converging(double coarse, double fine) {
  return (coarse <= kRoundingFloor && fine <= kRoundingFloor) ||
         coarse >= kRefinementFactor * fine;
}

}  // namespace

CommandResult cmd_verify(const RunConfig& c, std::ostream& log) {
  CommandResult result;
  Writer out(c, log, result);
  const AnnulusSpec spec(c.epsilon);
  const double el_tol = 100.0 * c.tol;

  Json checks = Json::array();
  std::string first_failure;
  auto record = [&](Json check, bool passed) {
    check["passed"] = passed;
    if (!passed && first_failure.empty()) {
      first_failure = check["name"].get<std::string>() + " (p = " + check["p"].dump() + ")";
    }
    checks.push_back(std::move(check));
  };

  for (const auto& pn : c.p_list) {
    const double p = pn.value();
    auto profile = radial::solve_optimal_profile(spec, p, c.nodes, c.tol);
    if (c.sabotage) profile = sabotaged(profile);

    const double el = radial::el_residual(profile, p);
    record({{"name", "el_residual"}, {"p", p}, {"value", el}, {"threshold", el_tol}}, el <= el_tol);

    {
      const PolarGrid coarse(c.epsilon, c.grid_r, c.grid_phi);
      const PolarGrid fine = coarse.refined();
      const auto rc = variational::el_residual_2d(lift_profile(profile, coarse), lift_arg(coarse), p);
      const auto rf = variational::el_residual_2d(lift_profile(profile, fine), lift_arg(fine), p);
      const bool ok = converging(rc.res_psi, rf.res_psi) && converging(rc.res_theta, rf.res_theta) &&
                      converging(rc.res_bc, rf.res_bc);
      record({{"name", "el_residual_2d"},
              {"p", p},
              {"coarse", {{"res_psi", rc.res_psi}, {"res_theta", rc.res_theta}, {"res_bc", rc.res_bc}}},
              {"fine", {{"res_psi", rf.res_psi}, {"res_theta", rf.res_theta}, {"res_bc", rf.res_bc}}},
              {"required_factor", kRefinementFactor},
              {"rounding_floor", kRoundingFloor}},
             ok);
    }

    variational::PerturbationOptions options;
    options.n_r = c.grid_r;
    options.n_phi = c.grid_phi;
    options.profile_nodes = c.nodes;
    auto suite_json = [&](const char* name, const variational::OptimalityReport& r) {
      Json energies = Json::array();
      for (const auto& [id, e] : r.perturbed_energies) energies.push_back({id, e});
      return Json{{"name", name},
                  {"p", p},
                  {"baseline_energy", r.baseline_energy},
                  {"slack", r.slack},
                  {"perturbed_energies", energies},
                  {"violations", r.violations},
                  {"rejected_samples", r.rejected_samples}};
    };
    const auto psi = variational::perturb_psi_test(spec, p, c.n_pert, c.amplitude, c.seed, options);
    record(suite_json("perturb_psi", psi), psi.violations.empty());
    const auto theta = variational::perturb_theta_test(spec, radial::ProfileKind::optimal, p,
                                                       c.n_pert, c.amplitude, c.seed, options);
    record(suite_json("perturb_theta", theta), theta.violations.empty());

    Json cases = Json::array();
    bool all = true;
    for (double a : {1.0, 2.0}) {
      for (double m : {1.0, 3.0}) {
        const auto h = variational::gp_hessian_bound_check(a, m, p, 200, c.seed);
        all = all && h.passed;
        cases.push_back({{"A", a}, {"M", m}, {"passed", h.passed}, {"bound", h.bound},
                         {"worst_margin", h.worst_margin}});
      }
    }
    record({{"name", "gp_hessian_bound"}, {"p", p}, {"cases", cases}}, all);
  }

  Json report;
  report["checks"] = checks;
  report["all_passed"] = first_failure.empty();
  report["first_failure"] = first_failure.empty() ? Json() : Json(first_failure);
  out.json("verify_eps" + format_real(c.epsilon) + ".json", report);

  if (!first_failure.empty()) {
    log << "verification failed: " << first_failure << '\n';
    result.exit_code = kExitVerification;
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Vec2> circle(const conformal::AnalyticMap* map, double radius, int n) {
  std::vector<Vec2> pts;
  for (int k = 0; k <= n; ++k) {
    const conformal::Complex w = std::polar(radius, 2.0 * std::numbers::pi * k / n);
    pts.push_back(conformal::to_vec(map ? map->inverse(w) : w));
  }
  return pts;
}

Json points_json(const std::vector<Vec2>& pts) {
  Json arr = Json::array();
  for (const auto& q : pts) arr.push_back({q.x, q.y});
  return arr;
}

}  // namespace

CommandResult cmd_conformal(const RunConfig& c, std::ostream& log) {
  CommandResult result;
  Writer out(c, log, result);
  const AnnulusSpec spec(c.epsilon);
  const PNorm p = c.p_list.front();
  const conformal::ComposedCloakMap m{conformal::builtin_map(c.map), profile_for(spec, p, c)};
  const auto rays = conformal::sample_rays(m, c.rays, c.points);
  const double trace_dev = conformal::trace_identity_deviation(m, 32, 64);
  const auto boundary = conformal::boundary_deviation(m, 256);
  const std::string stem = "conformal_" + c.map + "_eps" + format_real(c.epsilon);

  if (c.formats.json) {
    Json jr = Json::array();
    for (const auto& r : rays) {
      jr.push_back({{"angle", r.angle},
                    {"source", points_json(r.source)},
                    {"image", points_json(r.image)},
                    {"reference_source", points_json(r.reference_source)},
                    {"reference_image", points_json(r.reference_image)}});
    }
    Json results;
    results["map"] = m.analytic.name();
    results["profile"] = radial::to_string(m.profile.kind());
    results["trace_identity_deviation"] = trace_dev;
    results["boundary_deviation"] = {{"outer", boundary.outer}, {"inner", boundary.inner}};
    if (p.is_finite()) {
      results["modified_energy"] = conformal::modified_energy(m, p.value());
      results["radial_energy"] = radial::energy_p(m.profile, p.value()).value;
    }
    results["rays"] = jr;
    out.json(stem + ".json", results);
  }

  if (c.formats.csv) {
    CsvTable table({"ray", "angle", "t", "x", "y", "image_x", "image_y"});
    for (std::size_t k = 0; k < rays.size(); ++k) {
      const auto& r = rays[k];
      for (std::size_t i = 0; i < r.source.size(); ++i) {
        table.row()
            .cell(std::to_string(k))
            .cell(r.angle)
            .cell(std::abs(conformal::to_complex(r.reference_source[i])))
            .cell(r.source[i].x)
            .cell(r.source[i].y)
            .cell(r.image[i].x)
            .cell(r.image[i].y);
      }
    }
    out.csv(stem + "_rays.csv", std::move(table));
  }

  if (c.formats.svg) {
    // Top row: reference annulus before and after Phi_eps.  Bottom row: the
    // same picture on Omega, before and after Psi_eps.
    double extent = 1.0;
    for (const auto& q : circle(&m.analytic, 1.0, 256)) {
      extent = std::max({extent, std::abs(q.x), std::abs(q.y)});
    }
    const double box = 1.25 * extent;
    const double size = 260;
    const double gap = 90;
    const double left = 40;
    const double top = 40;
    auto panel = [&](int col, int row) {
      return SvgDocument::Panel{left + col * (size + gap), top + row * (size + gap), size, size,
                                -box, box, -box, box, true};
    };
    const auto tl = panel(0, 0);
    const auto tr = panel(1, 0);
    const auto bl = panel(0, 1);
    const auto br = panel(1, 1);

    SvgDocument svg(2 * size + gap + 2 * left, 2 * size + gap + 2 * top);
    svg.add_metadata(out.metadata());
    for (const auto* pnl : {&tl, &tr, &bl, &br}) {
      const Vec2 x0 = pnl->map({-box, 0.0});
      const Vec2 x1 = pnl->map({box, 0.0});
      const Vec2 y0 = pnl->map({0.0, -box});
      const Vec2 y1 = pnl->map({0.0, box});
      svg.line(x0.x, x0.y, x1.x, x1.y, "#808080", 0.8, true);
      svg.line(y0.x, y0.y, y1.x, y1.y, "#808080", 0.8, true);
    }
    const int n_circle = 400;
    for (double radius : {c.epsilon, 1.0}) {
      svg.polyline(tl, circle(nullptr, radius, n_circle), "#1f3fbf", 1.2);
      svg.polyline(bl, circle(&m.analytic, radius, n_circle), "#1f3fbf", 1.2);
    }
    for (double radius : {0.5, 1.0}) {
      svg.polyline(tr, circle(nullptr, radius, n_circle), "#1f3fbf", 1.2);
      svg.polyline(br, circle(&m.analytic, radius, n_circle), "#1f3fbf", 1.2);
    }
    for (const auto& r : rays) {
      svg.polyline(tl, r.reference_source, "#1a9641", 1.0);
      svg.polyline(bl, r.source, "#1a9641", 1.0);
      svg.polyline(tr, r.reference_image, "#d7191c", 1.0);
      svg.polyline(br, r.image, "#d7191c", 1.0);
    }
    const double mid_x = left + size + 0.5 * gap;
    const double mid_y = top + size + 0.5 * gap;
    svg.line(left + 0.5 * size, mid_y + 30, left + 0.5 * size, mid_y - 30, "#000000", 1.5, true);
    svg.text(left + 0.5 * size + 8, mid_y + 4, "Psi", 13, "start");
    svg.line(tr.x0 + 0.5 * size, mid_y - 30, tr.x0 + 0.5 * size, mid_y + 30, "#000000", 1.5, true);
    svg.text(tr.x0 + 0.5 * size + 8, mid_y + 4, "Psi^-1", 13, "start");
    svg.line(mid_x - 30, top + 0.5 * size, mid_x + 30, top + 0.5 * size, "#000000", 1.5, true);
    svg.text(mid_x, top + 0.5 * size - 8, "Phi_eps", 13);
    svg.line(mid_x - 30, bl.y0 + 0.5 * size, mid_x + 30, bl.y0 + 0.5 * size, "#000000", 1.5, true);
    svg.text(mid_x, bl.y0 + 0.5 * size + 20, "Psi_eps", 13);
    svg.text(mid_x, 22, "map " + m.analytic.name() + ", eps = " + format_real(c.epsilon), 14);
    out.write(stem + ".svg", svg.str());
  }

  log << "trace identity max deviation " << format_real(trace_dev) << '\n';
  return result;
}

}  // namespace cloak::cli
