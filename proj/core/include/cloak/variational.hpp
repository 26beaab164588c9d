#pragma once

// Two-dimensional optimality checks for cloaking maps exp(psi) (cos theta,
// sin theta).  With u = psi, V = -J D theta (or u = theta, V = J D psi) the
// trace of the push-forward becomes (|Du|^2 + |V|^2) / (Du . V), and the
// energy becomes the convex functional
//
//   F_p(u) = \int (( |Du|^2 + |V|^2 ) / (Du . V))^p dx.
//
// Everything below is evaluated on a PolarGrid with finite differences.

#include <cstdint>
#include <string>
#include <vector>

#include "cloak/polar_grid.hpp"
#include "cloak/radial.hpp"

namespace cloak::variational {

// Pointwise integrand ((|Du|^2 + |V|^2) / (Du . V))^p.
double fp_integrand(Vec2 du, Vec2 v, double p);

// Per-node integrand values.  Throws ConstraintError naming the nodes where
// Du . V <= 0.
std::vector<double> fp_integrand_field(const ScalarField2D& u, const VectorField2D& v, double p);

double functional_Fp(const ScalarField2D& u, const VectorField2D& v, double p);

// I_p of the pair (psi, theta); the same as functional_Fp(psi, -J D theta).
double pair_energy(const ScalarField2D& psi, const ScalarField2D& theta, double p);

// <DF_p(u), h>: the exact directional derivative of the discrete F_p.
double gateaux_differential(const ScalarField2D& u, const VectorField2D& v, double p,
                            const ScalarField2D& h);

// L2 norm squared of D(u0 - u1) with the grid quadrature.
double gradient_distance_squared(const ScalarField2D& u0, const ScalarField2D& u1);

// ---------------------------------------------------------------------------
// Convexity of G_p[A](x, y) = (A/x + x/A + (x/A)(y/x)^2)^p.

double gp_function(double a, double x, double y, double p);

struct HessianSample {
  double x = 0.0;
  double y = 0.0;
  double min_eigenvalue = 0.0;
  double bound = 0.0;
};

struct HessianCheckResult {
  bool passed = true;
  double bound = 0.0;
  // Smallest (min eigenvalue - bound) seen over all samples.
  double worst_margin = 0.0;
  std::vector<HessianSample> failures;

  explicit operator bool() const { return passed; }
};

// Samples (x, y) uniformly in the half disc x > 0, x^2 + y^2 < M^2 and
// checks that the finite-difference Hessian of G_p[A] has smallest
// eigenvalue >= 4 A^4 / (A^2 + M^2)^3 up to a finite-difference slack.
HessianCheckResult gp_hessian_bound_check(double a, double m, double p, int n_samples,
                                          std::uint64_t seed);

// Convexity modulus 2 inf|V|^4 / (n^2 + sup|V|^2)^3 for gradients bounded
// by n.
double convexity_constant(const VectorField2D& v, double gradient_bound);

// gap(tau) = tau F(u0) + (1 - tau) F(u1) - F(tau u0 + (1 - tau) u1)
//            - tau (1 - tau) K ||D(u0 - u1)||^2
// at tau = k / (n_tau + 1), k = 1..n_tau.  Non-negative up to rounding.
std::vector<double> strict_convexity_probe(const ScalarField2D& u0, const ScalarField2D& u1,
                                           const VectorField2D& v, double p, int n_tau);

// ---------------------------------------------------------------------------
// Euler-Lagrange equations of a global minimizer (psi, theta).

// T^p (2 Dpsi / (|Dpsi|^2 + |Dtheta|^2) + J Dtheta / det)
Vec2 flux_psi(Vec2 d_psi, Vec2 d_theta, double p);
// T^p (2 Dtheta / (|Dpsi|^2 + |Dtheta|^2) - J Dpsi / det)
Vec2 flux_theta(Vec2 d_psi, Vec2 d_theta, double p);
// T^(p-1) (2 Du / (Du . V) - (|Du|^2 + |V|^2) / (Du . V)^2 V), the flux of
// the Euler-Lagrange equation of F_p.
Vec2 flux_fp(Vec2 du, Vec2 v, double p);
// (T J Dpsi - 2 Dtheta); its normal component vanishes on r = eps.
Vec2 boundary_vector(Vec2 d_psi, Vec2 d_theta);

struct EulerLagrangeResiduals {
  double res_psi = 0.0;
  double res_theta = 0.0;
  double res_bc = 0.0;
};

// Max-norm of the discrete divergence of both fluxes over interior nodes,
// each divided by the largest flux magnitude, and the max normal component
// of the boundary vector on r = eps divided by its largest magnitude there.
// Throws OrientationError where det(Dpsi, Dtheta) <= 0.
EulerLagrangeResiduals el_residual_2d(const ScalarField2D& psi, const ScalarField2D& theta,
                                      double p);

// ---------------------------------------------------------------------------
// Perturbation suites.

struct PerturbationOptions {
  int n_r = 64;
  int n_phi = 128;
  RadialSpacing spacing = RadialSpacing::geometric;
  int profile_nodes = 400;
  int radial_modes = 3;
  int angular_modes = 3;
  // Resamples allowed per perturbation before giving up.
  int retry_budget = 100;
  double admissibility_floor = 1e-6;
  double slack_factor = 10.0;
};

struct OptimalityReport {
  double baseline_energy = 0.0;
  // (perturbation id, energy), ordered by id.
  std::vector<std::pair<int, double>> perturbed_energies;
  // Ids whose energy fell below baseline - slack.
  std::vector<int> violations;
  // Midpoint convexity gaps (F(base) + F(pert)) / 2 - F((base + pert) / 2).
  std::vector<double> convexity_gap_estimates;
  double slack = 0.0;
  int rejected_samples = 0;
};

// psi = f_p + h with h a random combination of
// sin(k pi (r - eps) / (1 - eps)) {1, cos m phi, sin m phi}, scaled to
// max|h| = amplitude; theta = arg.
OptimalityReport perturb_psi_test(const AnnulusSpec& spec, double p, int n_pert,
                                  double amplitude, std::uint64_t seed,
                                  const PerturbationOptions& options = {});

// psi = f lift for the given profile kind (optimal uses p), theta = arg + h
// with h built from (1 - r) cos((k - 1) pi (r - eps) / (1 - eps))
// {1, cos m phi, sin m phi}, free on r = eps and zero on r = 1.
OptimalityReport perturb_theta_test(const AnnulusSpec& spec, radial::ProfileKind f_kind,
                                    double p, int n_pert, double amplitude, std::uint64_t seed,
                                    const PerturbationOptions& options = {});

}  // namespace cloak::variational
