#include "cloak/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cloak/errors.hpp"

namespace cloak::variational {
namespace {

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must be a finite real >= 1");
}

void require_same_grid(const PolarGrid& a, const PolarGrid& b) {
  if (a.n_r() != b.n_r() || a.n_phi() != b.n_phi() || a.epsilon() != b.epsilon() ||
      a.spacing() != b.spacing()) {
    throw ValidationError("fields live on different grids");
  }
}

[[noreturn]] void throw_constraint(const PolarGrid& grid, const std::vector<std::size_t>& bad) {
  std::ostringstream os;
  os << "Du.V <= 0 at " << bad.size() << " node(s):";
  const std::size_t shown = std::min<std::size_t>(bad.size(), 8);
  for (std::size_t k = 0; k < shown; ++k) {
    const auto i = bad[k] / static_cast<std::size_t>(grid.n_phi());
    const auto j = bad[k] % static_cast<std::size_t>(grid.n_phi());
    os << " (" << i << "," << j << ")";
  }
  if (shown < bad.size()) os << " ...";
  throw ConstraintError(os.str());
}

// Smallest eigenvalue of the symmetric matrix [[a, b], [b, c]].
double min_eigenvalue(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  return mean - radius;
}

}  // namespace

double fp_integrand(Vec2 du, Vec2 v, double p) {
  const double proj = dot(du, v);
  const double t = (norm2(du) + norm2(v)) / proj;
  return p == 1.0 ? t : std::pow(t, p);
}

std::vector<double> fp_integrand_field(const ScalarField2D& u, const VectorField2D& v,
                                       double p) {
  require_p(p);
  require_same_grid(u.grid(), v.grid);
  const auto grads = u.gradients();
  std::vector<double> out(grads.size());
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    if (!(dot(grads[k], v.values[k]) > 0.0)) {
      bad.push_back(k);
      continue;
    }
    out[k] = fp_integrand(grads[k], v.values[k], p);
  }
  if (!bad.empty()) throw_constraint(u.grid(), bad);
  return out;
}

double functional_Fp(const ScalarField2D& u, const VectorField2D& v, double p) {
  const auto integrand = fp_integrand_field(u, v, p);
  const PolarGrid& grid = u.grid();
  double total = 0.0;
  for (int i = 0; i < grid.n_r(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < grid.n_phi(); ++j) ring += integrand[grid.index(i, j)];
    total += grid.area_weight(i) * ring;
  }
  return total;
}

double pair_energy(const ScalarField2D& psi, const ScalarField2D& theta, double p) {
  return functional_Fp(psi, minus_rotated_gradient(theta), p);
}

Vec2 flux_fp(Vec2 du, Vec2 v, double p) {
  const double proj = dot(du, v);
  const double num = norm2(du) + norm2(v);
  const double t = num / proj;
  const double scale = p == 1.0 ? 1.0 : std::pow(t, p - 1.0);
  return scale * (2.0 * du / proj - (num / (proj * proj)) * v);
}

double gateaux_differential(const ScalarField2D& u, const VectorField2D& v, double p,
                            const ScalarField2D& h) {
  require_p(p);
  require_same_grid(u.grid(), v.grid);
  require_same_grid(u.grid(), h.grid());
  (void)fp_integrand_field(u, v, p);  // admissibility
  const PolarGrid& grid = u.grid();
  double total = 0.0;
  for (int i = 0; i < grid.n_r(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < grid.n_phi(); ++j) {
      ring += dot(flux_fp(u.gradient(i, j), v.at(i, j), p), h.gradient(i, j));
    }
    total += grid.area_weight(i) * p * ring;
  }
  return total;
}

double gradient_distance_squared(const ScalarField2D& u0, const ScalarField2D& u1) {
  require_same_grid(u0.grid(), u1.grid());
  const auto diff = ScalarField2D::combine(1.0, u0, -1.0, u1);
  const PolarGrid& grid = u0.grid();
  double total = 0.0;
  for (int i = 0; i < grid.n_r(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < grid.n_phi(); ++j) ring += norm2(diff.gradient(i, j));
    total += grid.area_weight(i) * ring;
  }
  return total;
}

// ---------------------------------------------------------------------------

double gp_function(double a, double x, double y, double p) {
  const double ratio = y / x;
  const double base = a / x + x / a + (x / a) * ratio * ratio;
  return std::pow(base, p);
}

HessianCheckResult gp_hessian_bound_check(double a, double m, double p, int n_samples,
                                          std::uint64_t seed) {
  if (!(a > 0.0) || !(m > 0.0)) throw ValidationError("A and M must be positive");
  require_p(p);
  const double bound = 4.0 * std::pow(a, 4) / std::pow(a * a + m * m, 3);
  HessianCheckResult result;
  result.bound = bound;
  result.worst_margin = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, m);
  std::uniform_real_distribution<double> uy(-m, m);
  auto g = [&](double x, double y) { return gp_function(a, x, y, p); };

  for (int k = 0; k < n_samples; ++k) {
    double x = 0.0;
    double y = 0.0;
    do {
      x = ux(rng);
      y = uy(rng);
    } while (!(x > 0.0) || x * x + y * y >= m * m);

    const double h = 1e-4 * x;
    const double g0 = g(x, y);
    const double hxx = (g(x + h, y) - 2.0 * g0 + g(x - h, y)) / (h * h);
    const double hyy = (g(x, y + h) - 2.0 * g0 + g(x, y - h)) / (h * h);
    const double hxy =
        (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h)) / (4.0 * h * h);
    const double lmin = min_eigenvalue(hxx, hxy, hyy);
    const double scale = std::max({std::abs(hxx), std::abs(hyy), std::abs(hxy)});
    const double fd_slack = 1e-6 * scale;
    const double margin = lmin - bound;
    result.worst_margin = std::min(result.worst_margin, margin);
    if (margin < -fd_slack) {
      result.passed = false;
      result.failures.push_back({x, y, lmin, bound});
    }
  }
  return result;
}

double convexity_constant(const VectorField2D& v, double gradient_bound) {
  double inf_v = std::numeric_limits<double>::infinity();
  double sup_v = 0.0;
  for (const Vec2& w : v.values) {
    const double n = norm(w);
    inf_v = std::min(inf_v, n);
    sup_v = std::max(sup_v, n);
  }
  if (!(inf_v > 0.0)) throw ConstraintError("direction field vanishes somewhere (inf|V| = 0)");
  return 2.0 * std::pow(inf_v, 4) / std::pow(gradient_bound * gradient_bound + sup_v * sup_v, 3);
}

std::vector<double> strict_convexity_probe(const ScalarField2D& u0, const ScalarField2D& u1,
                                           const VectorField2D& v, double p, int n_tau) {
  if (n_tau < 1) throw ValidationError("n_tau must be positive");
  const double f0 = functional_Fp(u0, v, p);
  const double f1 = functional_Fp(u1, v, p);
  double n = 0.0;
  for (const auto* u : {&u0, &u1}) {
    for (const Vec2& g : u->gradients()) n = std::max(n, norm(g));
  }
  const double k = convexity_constant(v, n);
  const double dist = gradient_distance_squared(u0, u1);

  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(n_tau));
  for (int step = 1; step <= n_tau; ++step) {
    const double tau = static_cast<double>(step) / (n_tau + 1);
    const auto mix = ScalarField2D::combine(tau, u0, 1.0 - tau, u1);
    const double fmix = functional_Fp(mix, v, p);
    gaps.push_back(tau * f0 + (1.0 - tau) * f1 - fmix - tau * (1.0 - tau) * k * dist);
  }
  return gaps;
}

// ---------------------------------------------------------------------------

Vec2 flux_psi(Vec2 d_psi, Vec2 d_theta, double p) {
  const double det = cross(d_psi, d_theta);
  const double num = norm2(d_psi) + norm2(d_theta);
  const double t = num / det;
  return std::pow(t, p) * (2.0 * d_psi / num + rotate_quarter(d_theta) / det);
}

Vec2 flux_theta(Vec2 d_psi, Vec2 d_theta, double p) {
  const double det = cross(d_psi, d_theta);
  const double num = norm2(d_psi) + norm2(d_theta);
  const double t = num / det;
  return std::pow(t, p) * (2.0 * d_theta / num - rotate_quarter(d_psi) / det);
}

Vec2 boundary_vector(Vec2 d_psi, Vec2 d_theta) {
  const double det = cross(d_psi, d_theta);
  const double t = (norm2(d_psi) + norm2(d_theta)) / det;
  return t * rotate_quarter(d_psi) - 2.0 * d_theta;
}

EulerLagrangeResiduals el_residual_2d(const ScalarField2D& psi, const ScalarField2D& theta,
                                      double p) {
  require_p(p);
  require_same_grid(psi.grid(), theta.grid());
  const PolarGrid& grid = psi.grid();
  const auto dpsi = psi.gradients();
  const auto dtheta = theta.gradients();

  const std::size_t n = grid.size();
  // Polar components r F_r and F_phi of both fluxes.
  std::vector<double> rfr_psi(n), fphi_psi(n), rfr_theta(n), fphi_theta(n);
  double max_psi = 0.0;
  double max_theta = 0.0;
  for (int i = 0; i < grid.n_r(); ++i) {
    const double r = grid.radius(i);
    for (int j = 0; j < grid.n_phi(); ++j) {
      const std::size_t k = grid.index(i, j);
      if (!(cross(dpsi[k], dtheta[k]) > 0.0)) {
        throw OrientationError("det(Dpsi, Dtheta) <= 0 at node (" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
      }
      const Vec2 er = grid.e_r(j);
      const Vec2 et = grid.e_theta(j);
      const Vec2 f1 = flux_psi(dpsi[k], dtheta[k], p);
      const Vec2 f2 = flux_theta(dpsi[k], dtheta[k], p);
      rfr_psi[k] = r * dot(f1, er);
      fphi_psi[k] = dot(f1, et);
      rfr_theta[k] = r * dot(f2, er);
      fphi_theta[k] = dot(f2, et);
      max_psi = std::max(max_psi, norm(f1));
      max_theta = std::max(max_theta, norm(f2));
    }
  }

  // Fluxes on the boundary rows come from one-sided gradients whose error
  // does not match the interior one, so next to the boundary the radial
  // derivative uses a one-sided stencil over interior rows only.
  const int last = grid.n_r() - 1;
  auto divergence = [&](const std::vector<double>& rfr, const std::vector<double>& fphi, int i,
                        int j) {
    const double r = grid.radius(i);
    auto q = [&](int ii) { return rfr[grid.index(ii, j)]; };
    double radial = 0.0;
    if (i == 1 && last > 3) {
      radial = (-3.0 * q(1) + 4.0 * q(2) - q(3)) / (2.0 * grid.h_s());
    } else if (i == last - 1 && last > 3) {
      radial = (3.0 * q(i) - 4.0 * q(i - 1) + q(i - 2)) / (2.0 * grid.h_s());
    } else {
      radial = (q(i + 1) - q(i - 1)) / (2.0 * grid.h_s());
    }
    const double angular =
        (fphi[grid.index(i, j + 1)] - fphi[grid.index(i, j - 1)]) / (2.0 * grid.h_phi());
    return radial / (r * grid.metric(i)) + angular / r;
  };

  EulerLagrangeResiduals out;
  for (int i = 1; i + 1 < grid.n_r(); ++i) {
    for (int j = 0; j < grid.n_phi(); ++j) {
      out.res_psi = std::max(out.res_psi, std::abs(divergence(rfr_psi, fphi_psi, i, j)));
      out.res_theta = std::max(out.res_theta, std::abs(divergence(rfr_theta, fphi_theta, i, j)));
    }
  }
  out.res_psi /= max_psi;
  out.res_theta /= max_theta;

  double bc_max = 0.0;
  double bc_normal = 0.0;
  for (int j = 0; j < grid.n_phi(); ++j) {
    const std::size_t k = grid.index(0, j);
    const Vec2 b = boundary_vector(dpsi[k], dtheta[k]);
    bc_max = std::max(bc_max, norm(b));
    bc_normal = std::max(bc_normal, std::abs(dot(b, grid.e_r(j))));
  }
  out.res_bc = bc_max > 0.0 ? bc_normal / bc_max : bc_normal;
  return out;
}

}  // namespace cloak::variational
