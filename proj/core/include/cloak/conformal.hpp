#pragma once

// Cloaks on simply connected domains Omega obtained by conjugating a radial
// cloak with a conformal map Psi: Omega -> B_1,
//
//   Psi_eps = Psi^{-1} o Phi_eps o Psi.
//
// Psi is normalized by Psi(0) = 0 and Psi'(0) = a > 0.  Because D Psi is a
// multiple of a rotation, the trace of the push-forward is carried along:
// tr (Psi_eps)_*[I](x) = tr (Phi_eps)_*[I](Psi(x)).

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cloak/annulus.hpp"
#include "cloak/radial.hpp"

namespace cloak::conformal {

using Complex = std::complex<double>;

inline Complex to_complex(Vec2 v) { return {v.x, v.y}; }
inline Vec2 to_vec(Complex z) { return {z.real(), z.imag()}; }
// Real 2x2 matrix of multiplication by w.
inline Mat2 as_matrix(Complex w) { return {w.real(), -w.imag(), w.imag(), w.real()}; }

enum class MapKind { identity, sinh_domain, perturbed_power, composite };

std::string to_string(MapKind kind);

// A conformal map Psi: Omega -> B_1 given in closed form together with its
// inverse and the complex derivatives of both.
class AnalyticMap {
 public:
  // Omega = B_1.
  static AnalyticMap identity();
  // Psi = asinh on Omega = sinh(B_1), principal branch.  Evaluating Psi on
  // the branch cuts (Re z = 0, |Im z| >= 1) throws BranchError.
  static AnalyticMap sinh_domain();
  // Psi^{-1}(w) = w + c w^k.  Requires k >= 2 and |c| k < 1, which keeps
  // Psi^{-1} univalent on the closed disc.  Psi is found by Newton's method.
  static AnalyticMap perturbed_power(Complex c, int k);
  // Psi = outer o inner.  The caller guarantees that inner^{-1} is defined
  // on outer^{-1}(B_1).
  static AnalyticMap composite(const AnalyticMap& outer, const AnalyticMap& inner);

  MapKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  Complex forward(Complex z) const { return forward_(z); }
  Complex inverse(Complex w) const { return inverse_(w); }
  // Psi'(z).
  Complex derivative(Complex z) const { return derivative_(z); }
  // (Psi^{-1})'(w).
  Complex inverse_derivative(Complex w) const { return inverse_derivative_(w); }
  // a = Psi'(0).
  double scale() const;

 private:
  MapKind kind_ = MapKind::identity;
  std::string name_;
  std::function<Complex(Complex)> forward_;
  std::function<Complex(Complex)> inverse_;
  std::function<Complex(Complex)> derivative_;
  std::function<Complex(Complex)> inverse_derivative_;
};

// Built-in maps by CLI name: "identity", "sinh", "power" (c = 0.2, k = 2).
// Throws ValidationError listing the names for anything else.
AnalyticMap builtin_map(const std::string& name);
std::vector<std::string> builtin_map_names();

struct ComposedCloakMap {
  AnalyticMap analytic;
  radial::AmplitudeProfile profile;
};

// Psi^{-1}(exp(f(|y|)) y/|y|) with y = Psi(x).  Throws OutOfAnnulusError
// unless eps (1 - 1e-9) <= |y| <= 1 + 1e-9.
Vec2 evaluate_cloak_map(const ComposedCloakMap& m, Vec2 x);

// D Psi_eps at x = Psi^{-1}(y), written in terms of the reference point y:
// (Psi^{-1})'(Phi(y)) D Phi(y) / (Psi^{-1})'(y).
Mat2 cloak_jacobian_reference(const ComposedCloakMap& m, Vec2 y);
// The same at a physical point x.
Mat2 cloak_jacobian(const ComposedCloakMap& m, Vec2 x);

// Central-difference Jacobian of Psi_eps with step h.  The step is halved
// while any stencil point leaves the annulus; below 1e-9 OutOfAnnulusError
// is thrown.
Mat2 cloak_jacobian_fd(const ComposedCloakMap& m, Vec2 x, double h);

// Trace of the push-forward of the finite-difference Jacobian.
double pushforward_trace_at(const ComposedCloakMap& m, Vec2 x, double h);

// Largest |pushforward_trace_at(x) - radial_trace(|Psi(x)|, f'(|Psi(x)|))|
// over x = Psi^{-1}(rho e^{i phi}) on an n_r x n_phi cell-centred sample of
// the reference annulus.
double trace_identity_deviation(const ComposedCloakMap& m, int n_r, int n_phi, double h = 1e-5);

// ||D Psi(x) - gamma Q|| / gamma for the closest multiple of a rotation,
// with D Psi taken by central differences.
double conformality_defect(const AnalyticMap& map, Vec2 x, double h = 1e-6);

// \int_{Omega \ omega_eps} tr^p(x) |det D Psi(x)| dx, pulled back to the
// reference annulus: adaptive quadrature in rho of the angular mean over
// n_phi equally spaced angles.
double modified_energy(const ComposedCloakMap& m, double p, int n_phi = 64, double tol = 1e-11);

struct BoundaryDeviation {
  // max |Psi_eps(x) - x| over x on the outer boundary.
  double outer = 0.0;
  // max | |Psi(Psi_eps(x))| - 1/2 | over x on the inner boundary.
  double inner = 0.0;
};

BoundaryDeviation boundary_deviation(const ComposedCloakMap& m, int n_samples);

struct Ray {
  double angle = 0.0;
  std::vector<Vec2> source;            // Psi^{-1}(t e^{i angle}), t in [eps, 1]
  std::vector<Vec2> image;             // Psi_eps of the source points
  std::vector<Vec2> reference_source;  // t e^{i angle}
  std::vector<Vec2> reference_image;   // exp(f(t)) e^{i angle}
};

// Rays at angles 2 pi k / n_rays + pi / n_rays.
std::vector<Ray> sample_rays(const ComposedCloakMap& m, int n_rays, int n_points);

struct HoleDeviation {
  // max over |x| = eps of |Psi^{-1}(x) - x / a|.
  double deviation = 0.0;
  // max |(Psi^{-1})''| over the closed disc of radius 1/2, by finite differences.
  double second_derivative_max = 0.0;
  // second_derivative_max eps^2 / 2.
  double bound = 0.0;
};

HoleDeviation inner_hole_deviation(const AnalyticMap& map, double epsilon, int n_samples = 256);

}  // namespace cloak::conformal
