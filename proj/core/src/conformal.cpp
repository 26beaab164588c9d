#include "cloak/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cloak/errors.hpp"
#include "cloak/quadrature.hpp"

namespace cloak::conformal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex polar(double rho, double phi) { return {rho * std::cos(phi), rho * std::sin(phi)}; }

double annulus_radius_or_throw(const ComposedCloakMap& m, Complex y) {
  const double eps = m.profile.epsilon();
  const double rho = std::abs(y);
  if (!(rho >= eps * (1.0 - 1e-9) && rho <= 1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "point maps to |Psi(x)| = " << rho << ", outside [" << eps << ", 1]";
    throw OutOfAnnulusError(msg.str());
  }
  return std::clamp(rho, eps, 1.0);
}

bool inside_closed_annulus(const ComposedCloakMap& m, Vec2 x) {
  const double rho = std::abs(m.analytic.forward(to_complex(x)));
  return rho >= m.profile.epsilon() && rho <= 1.0;
}

// Newton solve of w + c w^k = z, continued from w = 0 along t z.
Complex invert_power(Complex z, Complex c, int k) {
  auto g = [&](Complex w) { return w + c * std::pow(w, k); };
  auto dg = [&](Complex w) { return 1.0 + c * static_cast<double>(k) * std::pow(w, k - 1); };
  Complex w = 0.0;
  constexpr int kSteps = 8;
  for (int s = 1; s <= kSteps; ++s) {
    const Complex target = z * (static_cast<double>(s) / kSteps);
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const Complex step = (g(w) - target) / dg(w);
      w -= step;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) {
        converged = true;
        break;
      }
    }
    // Intermediate stages only need a good starting point.
    if (s == kSteps && !converged && std::abs(g(w) - z) > 1e-14 * (1.0 + std::abs(z))) {
      throw ConvergenceError("Newton inversion of w + c w^k did not converge");
    }
  }
  return w;
}

}  // namespace

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::identity: return "identity";
    case MapKind::sinh_domain: return "sinh_domain";
    case MapKind::perturbed_power: return "perturbed_power";
    case MapKind::composite: return "composite";
  }
  return "unknown";
}

AnalyticMap AnalyticMap::identity() {
  AnalyticMap m;
  m.kind_ = MapKind::identity;
  m.name_ = "identity";
  m.forward_ = [](Complex z) { return z; };
  m.inverse_ = [](Complex w) { return w; };
  m.derivative_ = [](Complex) { return Complex(1.0); };
  m.inverse_derivative_ = [](Complex) { return Complex(1.0); };
  return m;
}

AnalyticMap AnalyticMap::sinh_domain() {
  AnalyticMap m;
  m.kind_ = MapKind::sinh_domain;
  m.name_ = "sinh";
  auto asinh_checked = [](Complex z) {
    if (std::abs(z.real()) <= 1e-15 * std::max(1.0, std::abs(z)) && std::abs(z.imag()) >= 1.0) {
      std::ostringstream msg;
      msg << "asinh evaluated on its branch cut at " << z;
      throw BranchError(msg.str());
    }
    return std::asinh(z);
  };
  m.forward_ = asinh_checked;
  m.inverse_ = [](Complex w) { return std::sinh(w); };
  // 1/sqrt(1 + z^2) on the branch continuous from z = 0: cosh(asinh z) has
  // positive real part whenever |Im asinh z| < pi/2.
  m.derivative_ = [asinh_checked](Complex z) { return 1.0 / std::cosh(asinh_checked(z)); };
  m.inverse_derivative_ = [](Complex w) { return std::cosh(w); };
  return m;
}

AnalyticMap AnalyticMap::perturbed_power(Complex c, int k) {
  if (k < 2) throw ValidationError("perturbed_power needs k >= 2");
  if (!(std::abs(c) * k < 1.0)) {
    throw ValidationError("perturbed_power needs |c| k < 1 to stay univalent on the disc");
  }
  AnalyticMap m;
  m.kind_ = MapKind::perturbed_power;
  std::ostringstream name;
  name << "power(c=" << c << ",k=" << k << ")";
  m.name_ = name.str();
  m.inverse_ = [c, k](Complex w) { return w + c * std::pow(w, k); };
  m.inverse_derivative_ = [c, k](Complex w) {
    return 1.0 + c * static_cast<double>(k) * std::pow(w, k - 1);
  };
  m.forward_ = [c, k](Complex z) { return invert_power(z, c, k); };
  m.derivative_ = [c, k](Complex z) {
    const Complex w = invert_power(z, c, k);
    return 1.0 / (1.0 + c * static_cast<double>(k) * std::pow(w, k - 1));
  };
  return m;
}

AnalyticMap AnalyticMap::composite(const AnalyticMap& outer, const AnalyticMap& inner) {
  AnalyticMap m;
  m.kind_ = MapKind::composite;
  m.name_ = outer.name_ + " o " + inner.name_;
  m.forward_ = [outer, inner](Complex z) { return outer.forward(inner.forward(z)); };
  m.inverse_ = [outer, inner](Complex w) { return inner.inverse(outer.inverse(w)); };
  m.derivative_ = [outer, inner](Complex z) {
    return outer.derivative(inner.forward(z)) * inner.derivative(z);
  };
  m.inverse_derivative_ = [outer, inner](Complex w) {
    return inner.inverse_derivative(outer.inverse(w)) * outer.inverse_derivative(w);
  };
  return m;
}

double AnalyticMap::scale() const { return derivative(0.0).real(); }

std::vector<std::string> builtin_map_names() { return {"identity", "sinh", "power"}; }

AnalyticMap builtin_map(const std::string& name) {
  if (name == "identity") return AnalyticMap::identity();
  if (name == "sinh") return AnalyticMap::sinh_domain();
  if (name == "power") return AnalyticMap::perturbed_power(0.2, 2);
  std::string known;
  for (const auto& n : builtin_map_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown map '" + name + "'; built-in maps: " + known);
}

// ---------------------------------------------------------------------------

Vec2 evaluate_cloak_map(const ComposedCloakMap& m, Vec2 x) {
  const Complex y = m.analytic.forward(to_complex(x));
  const double rho = annulus_radius_or_throw(m, y);
  const Complex z = std::exp(m.profile.value_at(rho)) * (y / std::abs(y));
  return to_vec(m.analytic.inverse(z));
}

Mat2 cloak_jacobian_reference(const ComposedCloakMap& m, Vec2 y) {
  const Complex yc = to_complex(y);
  const double rho = annulus_radius_or_throw(m, yc);
  const Vec2 e = y / norm(y);
  const double amp = std::exp(m.profile.value_at(rho));
  const double fp = m.profile.slope_at(rho);
  const Mat2 proj = Mat2::outer(e, e);
  // D (e^f(rho) y/rho) = e^f (f' e e^T + (I - e e^T) / rho)
  const Mat2 d_phi = (proj * fp + (Mat2::identity() - proj) * (1.0 / rho)) * amp;
  const Complex z = amp * (yc / std::abs(yc));
  return as_matrix(m.analytic.inverse_derivative(z)) * d_phi *
         as_matrix(1.0 / m.analytic.inverse_derivative(yc));
}

Mat2 cloak_jacobian(const ComposedCloakMap& m, Vec2 x) {
  return cloak_jacobian_reference(m, to_vec(m.analytic.forward(to_complex(x))));
}

Mat2 cloak_jacobian_fd(const ComposedCloakMap& m, Vec2 x, double h) {
  if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
  constexpr double kFloor = 1e-9;
  const Vec2 ex{1.0, 0.0};
  const Vec2 ey{0.0, 1.0};
  while (!(inside_closed_annulus(m, x + h * ex) && inside_closed_annulus(m, x - h * ex) &&
           inside_closed_annulus(m, x + h * ey) && inside_closed_annulus(m, x - h * ey))) {
    h *= 0.5;
    if (h < kFloor) {
      throw OutOfAnnulusError("finite-difference stencil leaves the annulus even at the step floor");
    }
  }
  const Vec2 cx = (evaluate_cloak_map(m, x + h * ex) - evaluate_cloak_map(m, x - h * ex)) / (2.0 * h);
  const Vec2 cy = (evaluate_cloak_map(m, x + h * ey) - evaluate_cloak_map(m, x - h * ey)) / (2.0 * h);
  return Mat2::from_columns(cx, cy);
}

double pushforward_trace_at(const ComposedCloakMap& m, Vec2 x, double h) {
  return push_forward_tensor(cloak_jacobian_fd(m, x, h)).trace();
}

double trace_identity_deviation(const ComposedCloakMap& m, int n_r, int n_phi, double h) {
  if (n_r < 1 || n_phi < 1) throw ValidationError("sample sizes must be positive");
  const double eps = m.profile.epsilon();
  double worst = 0.0;
  for (int i = 0; i < n_r; ++i) {
    const double rho = eps + (i + 0.5) * (1.0 - eps) / n_r;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * kTwoPi / n_phi;
      const Vec2 x = to_vec(m.analytic.inverse(polar(rho, phi)));
      const double r_img = std::abs(m.analytic.forward(to_complex(x)));
      const double expected = radial_trace(r_img, m.profile.slope_at(r_img));
      worst = std::max(worst, std::abs(pushforward_trace_at(m, x, h) - expected));
    }
  }
  return worst;
}

double conformality_defect(const AnalyticMap& map, Vec2 x, double h) {
  const Complex z = to_complex(x);
  const Complex dx = (map.forward(z + h) - map.forward(z - h)) / (2.0 * h);
  const Complex dy = (map.forward(z + Complex(0.0, h)) - map.forward(z - Complex(0.0, h))) / (2.0 * h);
  const Mat2 jac = Mat2::from_columns(to_vec(dx), to_vec(dy));
  const double alpha = 0.5 * (jac.a11 + jac.a22);
  const double beta = 0.5 * (jac.a21 - jac.a12);
  const double gamma = std::hypot(alpha, beta);
  return (jac - Mat2{alpha, -beta, beta, alpha}).norm() / gamma;
}

double modified_energy(const ComposedCloakMap& m, double p, int n_phi, double tol) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must be a finite real >= 1");
  if (n_phi < 1) throw ValidationError("n_phi must be positive");
  const double eps = m.profile.epsilon();
  // Substituting y = Psi(x) turns |det D Psi| dx into dy.
  auto ring = [&](double rho) {
    double sum = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const Vec2 y = to_vec(polar(rho, (j + 0.5) * kTwoPi / n_phi));
      sum += std::pow(push_forward_tensor(cloak_jacobian_reference(m, y)).trace(), p);
    }
    return rho * sum * (kTwoPi / n_phi);
  };
  return quad::integrate(ring, eps, 1.0, tol, 1e-15).value;
}

BoundaryDeviation boundary_deviation(const ComposedCloakMap& m, int n_samples) {
  if (n_samples < 1) throw ValidationError("n_samples must be positive");
  const double eps = m.profile.epsilon();
  BoundaryDeviation out;
  for (int j = 0; j < n_samples; ++j) {
    const double phi = j * kTwoPi / n_samples;
    const Vec2 x_out = to_vec(m.analytic.inverse(polar(1.0, phi)));
    out.outer = std::max(out.outer, norm(evaluate_cloak_map(m, x_out) - x_out));
    const Vec2 x_in = to_vec(m.analytic.inverse(polar(eps, phi)));
    const double r_img = std::abs(m.analytic.forward(to_complex(evaluate_cloak_map(m, x_in))));
    out.inner = std::max(out.inner, std::abs(r_img - AnnulusSpec::kTargetInner));
  }
  return out;
}

std::vector<Ray> sample_rays(const ComposedCloakMap& m, int n_rays, int n_points) {
  if (n_rays < 1 || n_points < 2) throw ValidationError("need n_rays >= 1 and n_points >= 2");
  const double eps = m.profile.epsilon();
  std::vector<Ray> rays(static_cast<std::size_t>(n_rays));
  for (int k = 0; k < n_rays; ++k) {
    Ray& ray = rays[static_cast<std::size_t>(k)];
    ray.angle = kTwoPi * k / n_rays + std::numbers::pi / n_rays;
    const Complex dir = polar(1.0, ray.angle);
    for (int i = 0; i < n_points; ++i) {
      const double t = i == n_points - 1 ? 1.0 : eps + (1.0 - eps) * i / (n_points - 1);
      const Vec2 src = to_vec(m.analytic.inverse(t * dir));
      ray.source.push_back(src);
      ray.image.push_back(evaluate_cloak_map(m, src));
      ray.reference_source.push_back(to_vec(t * dir));
      ray.reference_image.push_back(to_vec(std::exp(m.profile.value_at(t)) * dir));
    }
  }
  return rays;
}

HoleDeviation inner_hole_deviation(const AnalyticMap& map, double epsilon, int n_samples) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw ValidationError("need 0 < eps <= 1/2");
  if (n_samples < 1) throw ValidationError("n_samples must be positive");
  HoleDeviation out;
  const double a = map.scale();
  for (int j = 0; j < n_samples; ++j) {
    const Complex x = polar(epsilon, j * kTwoPi / n_samples);
    out.deviation = std::max(out.deviation, std::abs(map.inverse(x) - x / a));
  }
  // Second differences along the real axis give the complex second derivative.
  constexpr double h = 1e-3;
  constexpr int kRadii = 16;
  constexpr int kAngles = 64;
  for (int i = 0; i <= kRadii; ++i) {
    const double rho = 0.5 * i / kRadii;
    for (int j = 0; j < (i == 0 ? 1 : kAngles); ++j) {
      const Complex z = polar(rho, j * kTwoPi / kAngles);
      const Complex d2 = (map.inverse(z + h) - 2.0 * map.inverse(z) + map.inverse(z - h)) / (h * h);
      out.second_derivative_max = std::max(out.second_derivative_max, std::abs(d2));
    }
  }
  out.bound = 0.5 * out.second_derivative_max * epsilon * epsilon;
  return out;
}

}  // namespace cloak::conformal
