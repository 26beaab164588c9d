#pragma once

// Radial cloaking transformations x -> exp(f(|x|)) x/|x| and their
// anisotropy energies.
//
// A profile f is admissible when f' > 0 on [eps, 1], f(eps) = -log 2 and
// f(1) = 0.  The radial energy is
//
//   I_p(f) = 2 pi \int_eps^1 (1/(r f') + r f')^p r dr,
//
// whose minimizer f_p satisfies the integrated Euler-Lagrange relation
// G(r f_p'(r)) = C0 / r^2 with G(t) = (1/t + t)^(p-1) (1 - 1/t^2) and a
// shooting constant C0 <= 0 chosen so that f_p(1) = 0.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cloak/annulus.hpp"

namespace cloak::radial {

// (1/t + t)^(p-1) (1 - 1/t^2).  Increasing in t, zero at t = 1.
double g_function(double t, double p);
double g_function_derivative(double t, double p);

// Solves g_function(t, p) = s for t > 0 with |G(t) - s| <= tol (1 + |s|).
// For p = 1 the closed form t = (1 - s)^(-1/2) is used; G is bounded above
// by 1 there, so s >= 1 raises RangeError.
double g_inverse(double s, double p, double tol = 1e-10);

// Generic bracketed Newton/bisection inverter, used for p > 1 and kept
// callable for p = 1 so the closed form can be cross-checked.
double g_inverse_bracketed(double s, double p, double tol = 1e-10);

enum class ProfileKind { optimal, affine, p1_closed_form, minimax, custom };

std::string to_string(ProfileKind kind);

// A sampled logarithmic amplitude f on [eps, 1].  Slopes are primary;
// values follow by integrating them.  Closed-form and optimal kinds also
// evaluate f and f' exactly between nodes.
class AmplitudeProfile {
 public:
  // Piecewise-linear slopes through the given nodes.  Values are the exact
  // integral of that interpolant starting from -log 2.  Throws
  // InadmissibleProfileError unless the invariants of an admissible profile
  // hold (f(1) = 0 within 1e-8).
  static AmplitudeProfile custom(double epsilon, std::vector<double> nodes,
                                 std::vector<double> slopes);

  // Low-level constructor used by the profile factories.  Validates node
  // ordering, positivity of slopes and the boundary values.
  static AmplitudeProfile sampled(ProfileKind kind, double epsilon, std::vector<double> nodes,
                                  std::vector<double> values, std::vector<double> slopes,
                                  std::optional<double> shooting_constant = std::nullopt,
                                  std::optional<double> exponent = std::nullopt);

  ProfileKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  // p of an optimal profile.
  std::optional<double> exponent() const { return exponent_; }
  std::optional<double> shooting_constant() const { return shooting_constant_; }

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slopes() const { return slopes_; }

  // f(r) and f'(r) for r in [eps, 1] (a relative slack of 1e-9 is clamped).
  double value_at(double r) const;
  double slope_at(double r) const;

 private:
  AmplitudeProfile() = default;
  double clamp_radius(double r) const;
  std::size_t interval_of(double r) const;

  ProfileKind kind_ = ProfileKind::custom;
  double epsilon_ = 0.5;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::optional<double> shooting_constant_;
  std::optional<double> exponent_;
};

// Uniform nodes eps = r_0 < ... < r_{n-1} = 1.
std::vector<double> uniform_nodes(double epsilon, int n_nodes);

// Minimizer f_p of I_p.  Throws ConvergenceError if the outer bisection on
// the shooting constant fails (the message carries the last bracket).
AmplitudeProfile solve_optimal_profile(const AnnulusSpec& spec, double p, int n_nodes,
                                       double tol = 1e-10);

// f_ra(r) = log((r - 1) / (2 (1 - eps)) + 1), the radial affine map.
AmplitudeProfile profile_affine(const AnnulusSpec& spec, int n_nodes);

// Closed-form minimizer for p = 1.
AmplitudeProfile profile_p1(const AnnulusSpec& spec, int n_nodes);

// f_inf(r) = (log 2 / |log eps|) log r, minimizer of the sup-norm energy.
AmplitudeProfile profile_minimax(const AnnulusSpec& spec, int n_nodes);

struct EnergyReport {
  PNorm p = PNorm::infinity();
  double value = 0.0;
  double quadrature_error_estimate = 0.0;
  ProfileKind profile_kind = ProfileKind::custom;
};

EnergyReport energy_p(const AmplitudeProfile& profile, double p, double tol = 1e-9);

// Largest radial trace over the profile nodes and the Gauss points of every
// node interval.
EnergyReport energy_inf(const AmplitudeProfile& profile);

// Spread of q(r) = r^2 G(r f'(r)) over the nodes, relative to 1 + |mean q|.
// Vanishes exactly for solutions of the Euler-Lagrange equation.
double el_residual(const AmplitudeProfile& profile, double p);

}  // namespace cloak::radial
