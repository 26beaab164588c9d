#include "cloak/annulus.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "cloak/errors.hpp"

namespace cloak {

AnnulusSpec::AnnulusSpec(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon <= kTargetInner)) {
    throw ValidationError("epsilon must satisfy 0 < epsilon <= 1/2, got " +
                          std::to_string(epsilon));
  }
}

double AnnulusSpec::area() const {
  return std::numbers::pi * (kOuter * kOuter - epsilon_ * epsilon_);
}

PNorm PNorm::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ValidationError("p must be a finite real >= 1, got " + std::to_string(p));
  }
  PNorm n;
  n.value_ = p;
  return n;
}

PNorm PNorm::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "INF") {
    return infinity();
  }
  double p = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, p);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("cannot parse p value '" + text + "'");
  }
  return finite(p);
}

double PNorm::value() const {
  if (!value_) throw ValidationError("infinite p has no finite value");
  return *value_;
}

std::string PNorm::to_string() const {
  if (!value_) return "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *value_);
  return std::string(buf, ptr);
}

std::pair<double, double> PushForwardTensor::eigenvalues() const {
  const double half_tr = 0.5 * trace();
  const double disc = std::max(0.0, half_tr * half_tr - det());
  const double root = std::sqrt(disc);
  const double l2 = half_tr + root;
  // l1 = det / l2 avoids cancellation when the tensor is strongly anisotropic.
  const double l1 = det() / l2;
  return {l1, l2};
}

Vec2 GradientPair::e_r(Vec2 x) { return x / norm(x); }

Vec2 GradientPair::e_theta(Vec2 x) { return rotate_quarter(x) / norm(x); }

GradientPair GradientPair::radial(Vec2 x, double fprime) {
  const double r = norm(x);
  return {fprime * e_r(x), e_theta(x) / r};
}

PushForwardTensor push_forward_tensor(const Mat2& dPhi) {
  const double det = dPhi.det();
  if (std::abs(det) < 1e-14) {
    throw SingularMatrixError("push-forward of a singular Jacobian (|det| = " +
                              std::to_string(std::abs(det)) + ")");
  }
  const Mat2 m = dPhi * dPhi.transposed();
  const double s = 1.0 / std::abs(det);
  return {m.a11 * s, 0.5 * (m.a12 + m.a21) * s, m.a22 * s};
}

double trace_from_gradients(const GradientPair& g) {
  const double det = g.det();
  if (!(det > 0.0)) {
    throw OrientationError("det(Dpsi, Dtheta) must be positive, got " + std::to_string(det));
  }
  return (norm2(g.d_psi) + norm2(g.d_theta)) / det;
}

double trace_angle_form(double mag_psi, double mag_theta, double angle) {
  if (!(mag_psi > 0.0) || !(mag_theta > 0.0)) {
    throw ValidationError("gradient magnitudes must be positive");
  }
  const double s = std::abs(std::sin(angle));
  if (s < 1e-14) throw DegenerateAngleError("gradients are parallel");
  return (mag_theta / mag_psi + mag_psi / mag_theta) / s;
}

double anisotropy_from_trace(double trace) {
  const double d = trace * trace - 4.0;
  // Rounding puts d on either side of zero at isotropy.
  if (std::abs(d) <= 1e-12) return 0.0;
  if (d < 0.0) {
    throw ValidationError("trace below 2 is impossible for a unit-determinant SPD tensor");
  }
  return std::sqrt(d);
}

double anisotropy_measure(const PushForwardTensor& t) { return anisotropy_from_trace(t.trace()); }

double radial_trace(double r, double fprime) {
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  if (!(fprime > 0.0)) {
    throw NonPositiveSlopeError("profile slope must be positive, got " + std::to_string(fprime));
  }
  const double t = r * fprime;
  return 1.0 / t + t;
}

}  // namespace cloak
