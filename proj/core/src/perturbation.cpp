#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cloak/errors.hpp"
#include "cloak/variational.hpp"

namespace cloak::variational {
namespace {

using radial::AmplitudeProfile;
using radial::ProfileKind;

// Radial factor of basis function k (1-based) for either perturbation family.
using RadialShape = double (*)(double r, double eps, int k);

double psi_shape(double r, double eps, int k) {
  return std::sin(k * std::numbers::pi * (r - eps) / (1.0 - eps));
}

double theta_shape(double r, double eps, int k) {
  return (1.0 - r) * std::cos((k - 1) * std::numbers::pi * (r - eps) / (1.0 - eps));
}

// Random combination of shape_k(r) {1, cos m phi, sin m phi} with
// max |h| = amplitude on the grid.
ScalarField2D random_bumps(const PolarGrid& grid, RadialShape shape, int radial_modes,
                           int angular_modes, double amplitude, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double eps = grid.epsilon();
  struct Term {
    int k;
    int m;
    double c_cos;
    double c_sin;
  };
  std::vector<Term> terms;
  for (int k = 1; k <= radial_modes; ++k) {
    for (int m = 0; m <= angular_modes; ++m) {
      const double c = normal(rng);
      const double s = m == 0 ? 0.0 : normal(rng);
      terms.push_back({k, m, c, s});
    }
  }
  auto h = ScalarField2D::from_function(grid, [&](double r, double phi) {
    double sum = 0.0;
    for (const Term& t : terms) {
      sum += shape(r, eps, t.k) * (t.c_cos * std::cos(t.m * phi) + t.c_sin * std::sin(t.m * phi));
    }
    return sum;
  });
  double peak = 0.0;
  for (double v : h.values()) peak = std::max(peak, std::abs(v));
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  return ScalarField2D::combine(scale, h, 0.0, h);
}

bool admissible(const ScalarField2D& u, const VectorField2D& v, double floor) {
  const auto grads = u.gradients();
  for (std::size_t k = 0; k < grads.size(); ++k) {
    if (!(dot(grads[k], v.values[k]) > floor)) return false;
  }
  return true;
}

AmplitudeProfile make_profile(const AnnulusSpec& spec, ProfileKind kind, double p, int nodes) {
  switch (kind) {
    case ProfileKind::optimal: return radial::solve_optimal_profile(spec, p, nodes);
    case ProfileKind::affine: return radial::profile_affine(spec, nodes);
    case ProfileKind::p1_closed_form: return radial::profile_p1(spec, nodes);
    case ProfileKind::minimax: return radial::profile_minimax(spec, nodes);
    case ProfileKind::custom: break;
  }
  throw ValidationError("perturbation suites need a built-in profile kind");
}

// Shared driver: `energy(u)` evaluates the functional for a candidate,
// `base` is the unperturbed field and `v` the fixed direction field.
// Zero amplitude reproduces the baseline exactly.
template <class Energy>
OptimalityReport run_suite(const ScalarField2D& base, const VectorField2D& v, double slack,
                           RadialShape shape, int n_pert, double amplitude,
                           std::uint64_t seed, const PerturbationOptions& options,
                           const Energy& energy) {
  OptimalityReport report;
  const double baseline = energy(base);
  report.baseline_energy = baseline;
  report.slack = slack;
  std::mt19937_64 rng(seed);
  for (int id = 0; id < n_pert; ++id) {
    int attempts = 0;
    while (true) {
      const auto h = random_bumps(base.grid(), shape, options.radial_modes,
                                  options.angular_modes, amplitude, rng);
      const auto candidate = ScalarField2D::combine(1.0, base, 1.0, h);
      if (!admissible(candidate, v, options.admissibility_floor)) {
        ++report.rejected_samples;
        if (++attempts > options.retry_budget) {
          throw RetryBudgetError("perturbation " + std::to_string(id) +
                                 " could not be kept admissible; lower the amplitude");
        }
        continue;
      }
      const double e = energy(candidate);
      const auto midpoint = ScalarField2D::combine(0.5, base, 0.5, candidate);
      const double e_mid = energy(midpoint);
      report.perturbed_energies.emplace_back(id, e);
      report.convexity_gap_estimates.push_back(0.5 * (baseline + e) - e_mid);
      if (e < baseline - slack) report.violations.push_back(id);
      break;
    }
  }
  return report;
}

void require_inputs(double p, int n_pert, double amplitude) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must be a finite real >= 1");
  if (n_pert < 0) throw ValidationError("number of perturbations must be non-negative");
  if (!(amplitude >= 0.0)) throw ValidationError("amplitude must be non-negative");
}

}  // namespace

OptimalityReport perturb_psi_test(const AnnulusSpec& spec, double p, int n_pert,
                                  double amplitude, std::uint64_t seed,
                                  const PerturbationOptions& options) {
  require_inputs(p, n_pert, amplitude);
  const PolarGrid grid(spec.epsilon(), options.n_r, options.n_phi, options.spacing);
  const auto profile = radial::solve_optimal_profile(spec, p, options.profile_nodes);

  auto baseline_on = [&](const PolarGrid& g) {
    return pair_energy(lift_profile(profile, g), lift_arg(g), p);
  };
  const double coarse = baseline_on(grid);
  const double fine = baseline_on(grid.refined());
  const double slack = options.slack_factor * std::abs(coarse - fine) + 1e-12 * coarse;

  const auto psi = lift_profile(profile, grid);
  const auto v = minus_rotated_gradient(lift_arg(grid));
  return run_suite(psi, v, slack, psi_shape, n_pert, amplitude, seed, options,
                   [&](const ScalarField2D& u) { return functional_Fp(u, v, p); });
}

OptimalityReport perturb_theta_test(const AnnulusSpec& spec, radial::ProfileKind f_kind,
                                    double p, int n_pert, double amplitude, std::uint64_t seed,
                                    const PerturbationOptions& options) {
  require_inputs(p, n_pert, amplitude);
  const PolarGrid grid(spec.epsilon(), options.n_r, options.n_phi, options.spacing);
  const auto profile = make_profile(spec, f_kind, p, options.profile_nodes);

  auto baseline_on = [&](const PolarGrid& g) {
    return pair_energy(lift_profile(profile, g), lift_arg(g), p);
  };
  const double coarse = baseline_on(grid);
  const double fine = baseline_on(grid.refined());
  const double slack = options.slack_factor * std::abs(coarse - fine) + 1e-12 * coarse;

  const auto theta = lift_arg(grid);
  const auto v = rotated_gradient(lift_profile(profile, grid));
  return run_suite(theta, v, slack, theta_shape, n_pert, amplitude, seed, options,
                   [&](const ScalarField2D& u) { return functional_Fp(u, v, p); });
}

}  // namespace cloak::variational
