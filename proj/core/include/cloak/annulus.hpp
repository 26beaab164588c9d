#pragma once

// Planar geometry of the cloaking annulus and the algebra of the
// push-forward of the identity tensor.  Everything here is 2D and pure.

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace cloak {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// det of the matrix with columns (a, b).
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
constexpr double norm2(Vec2 v) { return dot(v, v); }

// Rotation by +pi/2, the matrix [[0,-1],[1,0]].
constexpr Vec2 rotate_quarter(Vec2 v) { return {-v.y, v.x}; }

// Row-major 2x2 matrix [[a11, a12], [a21, a22]].
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
  // Columns c1, c2.
  static constexpr Mat2 from_columns(Vec2 c1, Vec2 c2) {
    return {c1.x, c2.x, c1.y, c2.y};
  }
  static constexpr Mat2 outer(Vec2 u, Vec2 v) {
    return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
  }

  constexpr double det() const { return a11 * a22 - a12 * a21; }
  constexpr double trace() const { return a11 + a22; }
  constexpr Mat2 transposed() const { return {a11, a21, a12, a22}; }
  constexpr Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  constexpr Vec2 operator*(Vec2 v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
  constexpr Mat2 operator+(const Mat2& o) const {
    return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
  }
  constexpr Mat2 operator-(const Mat2& o) const {
    return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
  }
  constexpr Mat2 operator*(double s) const {
    return {a11 * s, a12 * s, a21 * s, a22 * s};
  }
  // Frobenius norm.
  double norm() const { return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22); }
};

// Source annulus B_1 \ B_eps mapped onto B_1 \ B_{1/2}.
class AnnulusSpec {
 public:
  static constexpr double kTargetInner = 0.5;
  static constexpr double kOuter = 1.0;

  // Throws ValidationError unless 0 < epsilon <= 1/2.
  explicit AnnulusSpec(double epsilon);

  double epsilon() const { return epsilon_; }
  double target_inner() const { return kTargetInner; }
  double outer() const { return kOuter; }
  double area() const;

 private:
  double epsilon_;
};

// Exponent of the anisotropy energy: a finite p >= 1 or infinity.
class PNorm {
 public:
  static PNorm finite(double p);
  static PNorm infinity() { return PNorm(); }
  // Accepts a decimal number or "inf"/"infinity".
  static PNorm parse(const std::string& text);

  bool is_finite() const { return value_.has_value(); }
  // Throws ValidationError for the infinite norm.
  double value() const;
  std::string to_string() const;

  bool operator==(const PNorm& o) const = default;

 private:
  PNorm() = default;
  std::optional<double> value_;
};

// The symmetric positive definite matrix [[a, b], [b, c]] with unit
// determinant produced by pushing forward the identity.
struct PushForwardTensor {
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;

  double trace() const { return a + c; }
  double det() const { return a * c - b * b; }
  // Eigenvalues (lambda1 <= lambda2) from the trace/determinant closed form.
  std::pair<double, double> eigenvalues() const;
  Mat2 matrix() const { return {a, b, b, c}; }
};

struct GradientPair {
  Vec2 d_psi;
  Vec2 d_theta;

  double det() const { return cross(d_psi, d_theta); }

  static constexpr Mat2 rotation() { return {0.0, -1.0, 1.0, 0.0}; }
  static Vec2 e_r(Vec2 x);
  static Vec2 e_theta(Vec2 x);
  // Gradients of (f(|x|), arg x) for a radial profile with slope fprime.
  static GradientPair radial(Vec2 x, double fprime);
};

// D Phi D Phi^T / |det D Phi|.  Throws SingularMatrixError when
// |det dPhi| < 1e-14.
PushForwardTensor push_forward_tensor(const Mat2& dPhi);

// (|Dpsi|^2 + |Dtheta|^2) / det(Dpsi, Dtheta).  Throws OrientationError when
// the determinant is not positive.
double trace_from_gradients(const GradientPair& g);

// (1/|sin angle|) (m_theta/m_psi + m_psi/m_theta).
double trace_angle_form(double mag_psi, double mag_theta, double angle);

// lambda2 - lambda1 = sqrt(trace^2 - 4); rounding below isotropy is clamped.
double anisotropy_from_trace(double trace);
double anisotropy_measure(const PushForwardTensor& t);

// Trace for a radial map: 1/(r f') + r f'.
double radial_trace(double r, double fprime);

}  // namespace cloak
