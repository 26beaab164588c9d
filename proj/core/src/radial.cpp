#include "cloak/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cloak/errors.hpp"
#include "cloak/quadrature.hpp"

namespace cloak::radial {
namespace {

constexpr double kLog2 = std::numbers::ln2;

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ValidationError("p must be a finite real >= 1");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Constant of the p = 1 closed form: f_1'(r) = 1 / sqrt(r^2 + k) with
// k = 16 (2 - eps) (1/2 - eps) / 9.
double p1_offset(double eps) { return 16.0 * (2.0 - eps) * (0.5 - eps) / 9.0; }

double minimax_rate(double eps) {
  return eps == 0.5 ? 1.0 : kLog2 / std::abs(std::log(eps));
}

}  // namespace

double g_function(double t, double p) {
  if (!(t > 0.0)) throw ValidationError("g_function requires t > 0");
  require_p(p);
  const double a = 1.0 / t + t;
  const double slope = 1.0 - 1.0 / (t * t);
  return p == 1.0 ? slope : std::pow(a, p - 1.0) * slope;
}

double g_function_derivative(double t, double p) {
  if (!(t > 0.0)) throw ValidationError("g_function_derivative requires t > 0");
  require_p(p);
  const double a = 1.0 / t + t;
  const double slope = 1.0 - 1.0 / (t * t);
  const double curvature = 2.0 / (t * t * t);
  if (p == 1.0) return curvature;
  return (p - 1.0) * std::pow(a, p - 2.0) * slope * slope + std::pow(a, p - 1.0) * curvature;
}

double g_inverse_bracketed(double s, double p, double tol) {
  require_p(p);
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (p == 1.0 && s >= 1.0) {
    throw RangeError("G(t) = 1 - 1/t^2 < 1 for p = 1; no preimage for s = " + fmt(s));
  }
  if (s == 0.0) return 1.0;

  double lo = 1.0;
  double hi = 1.0;
  if (s > 0.0) {
    hi = 2.0;
    while (g_function(hi, p) < s) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e150) throw RangeError("G^{-1}(" + fmt(s) + ") exceeds the representable range");
    }
  } else {
    lo = 0.5;
    while (g_function(lo, p) > s) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-150) throw RangeError("G^{-1}(" + fmt(s) + ") below the representable range");
    }
  }

  // Newton in log t, safeguarded by the bracket.
  double t = std::sqrt(lo * hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double residual = g_function(t, p) - s;
    if (residual == 0.0) return t;
    if (residual < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double dlog = t * g_function_derivative(t, p);
    double next = t * std::exp(-residual / dlog);
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    const bool done = std::abs(next - t) <= 1e-15 * t || hi <= lo * (1.0 + 4e-16);
    t = next;
    if (done) break;
  }
  const double residual = std::abs(g_function(t, p) - s);
  if (residual > tol * (1.0 + std::abs(s))) {
    throw ConvergenceError("G^{-1}(" + fmt(s) + ") did not converge (residual " + fmt(residual) +
                           ")");
  }
  return t;
}

double g_inverse(double s, double p, double tol) {
  require_p(p);
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (p == 1.0) {
    if (s >= 1.0) {
      throw RangeError("G(t) = 1 - 1/t^2 < 1 for p = 1; no preimage for s = " + fmt(s));
    }
    return 1.0 / std::sqrt(1.0 - s);
  }
  return g_inverse_bracketed(s, p, tol);
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::optimal: return "optimal";
    case ProfileKind::affine: return "affine";
    case ProfileKind::p1_closed_form: return "p1_closed_form";
    case ProfileKind::minimax: return "minimax";
    case ProfileKind::custom: return "custom";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// AmplitudeProfile

AmplitudeProfile AmplitudeProfile::sampled(ProfileKind kind, double epsilon,
                                           std::vector<double> nodes,
                                           std::vector<double> values,
                                           std::vector<double> slopes,
                                           std::optional<double> shooting_constant,
                                           std::optional<double> exponent) {
  AnnulusSpec spec(epsilon);  // validates epsilon
  const std::size_t n = nodes.size();
  if (n < 2 || values.size() != n || slopes.size() != n) {
    throw InadmissibleProfileError("profile needs >= 2 nodes with matching values and slopes");
  }
  if (std::abs(nodes.front() - epsilon) > 1e-14 || std::abs(nodes.back() - 1.0) > 1e-14) {
    throw InadmissibleProfileError("profile nodes must span [eps, 1]");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      throw InadmissibleProfileError("profile nodes must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(slopes[i] > 0.0) || !std::isfinite(slopes[i])) {
      throw InadmissibleProfileError("profile slope must be positive at r = " + fmt(nodes[i]));
    }
  }
  if (std::abs(values.front() + kLog2) > 1e-10) {
    throw InadmissibleProfileError("profile must satisfy f(eps) = -log 2");
  }
  if (std::abs(values.back()) > 1e-8) {
    throw InadmissibleProfileError("profile must satisfy f(1) = 0, got " + fmt(values.back()));
  }
  AmplitudeProfile out;
  out.kind_ = kind;
  out.epsilon_ = spec.epsilon();
  out.nodes_ = std::move(nodes);
  out.values_ = std::move(values);
  out.slopes_ = std::move(slopes);
  out.shooting_constant_ = shooting_constant;
  out.exponent_ = exponent;
  return out;
}

AmplitudeProfile AmplitudeProfile::custom(double epsilon, std::vector<double> nodes,
                                          std::vector<double> slopes) {
  if (nodes.size() != slopes.size() || nodes.size() < 2) {
    throw InadmissibleProfileError("custom profile needs matching nodes and slopes");
  }
  std::vector<double> values(nodes.size());
  values[0] = -kLog2;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    values[i] = values[i - 1] + 0.5 * (slopes[i] + slopes[i - 1]) * (nodes[i] - nodes[i - 1]);
  }
  return sampled(ProfileKind::custom, epsilon, std::move(nodes), std::move(values),
                 std::move(slopes));
}

double AmplitudeProfile::clamp_radius(double r) const {
  const double slack = 1e-9;
  if (r < epsilon_ * (1.0 - slack) || r > 1.0 + slack || !std::isfinite(r)) {
    throw ValidationError("radius " + fmt(r) + " outside [eps, 1]");
  }
  return std::clamp(r, epsilon_, 1.0);
}

std::size_t AmplitudeProfile::interval_of(double r) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, nodes_.size() - 2);
}

double AmplitudeProfile::slope_at(double r_in) const {
  const double r = clamp_radius(r_in);
  const double eps = epsilon_;
  switch (kind_) {
    case ProfileKind::affine: return 1.0 / (r + 1.0 - 2.0 * eps);
    case ProfileKind::p1_closed_form: return 1.0 / std::sqrt(r * r + p1_offset(eps));
    case ProfileKind::minimax: return minimax_rate(eps) / r;
    case ProfileKind::optimal:
      return g_inverse(*shooting_constant_ / (r * r), *exponent_) / r;
    case ProfileKind::custom: {
      const std::size_t i = interval_of(r);
      const double w = (r - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
      return (1.0 - w) * slopes_[i] + w * slopes_[i + 1];
    }
  }
  return 0.0;
}

double AmplitudeProfile::value_at(double r_in) const {
  const double r = clamp_radius(r_in);
  const double eps = epsilon_;
  switch (kind_) {
    case ProfileKind::affine: return std::log((r - 1.0) / (2.0 * (1.0 - eps)) + 1.0);
    case ProfileKind::p1_closed_form:
      return std::log((3.0 * r + std::sqrt(9.0 * r * r + 16.0 * (2.0 - eps) * (0.5 - eps))) /
                      (4.0 * (2.0 - eps)));
    case ProfileKind::minimax: return minimax_rate(eps) * std::log(r);
    case ProfileKind::optimal: {
      if (*shooting_constant_ == 0.0) return std::log(r);
      const std::size_t i = interval_of(r);
      if (r == nodes_[i]) return values_[i];
      auto slope = [this](double t) { return slope_at(t); };
      return values_[i] + quad::integrate(slope, nodes_[i], r, 1e-13, 1e-16).value;
    }
    case ProfileKind::custom: {
      const std::size_t i = interval_of(r);
      const double h = nodes_[i + 1] - nodes_[i];
      const double d = r - nodes_[i];
      return values_[i] + slopes_[i] * d + 0.5 * (slopes_[i + 1] - slopes_[i]) * d * d / h;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Factories

std::vector<double> uniform_nodes(double epsilon, int n_nodes) {
  if (n_nodes < 2) throw ValidationError("need at least two nodes");
  std::vector<double> nodes(static_cast<std::size_t>(n_nodes));
  const double h = (1.0 - epsilon) / (n_nodes - 1);
  for (int i = 0; i < n_nodes; ++i) nodes[static_cast<std::size_t>(i)] = epsilon + i * h;
  nodes.front() = epsilon;
  nodes.back() = 1.0;
  return nodes;
}

namespace {

// Samples a closed-form kind through a temporary profile that only carries
// the kind and epsilon.
AmplitudeProfile sample_closed_form(ProfileKind kind, const AnnulusSpec& spec, int n_nodes) {
  const double eps = spec.epsilon();
  std::vector<double> nodes = uniform_nodes(eps, n_nodes);
  // Two-node skeleton with exact boundary values, used only to evaluate.
  AmplitudeProfile proto = AmplitudeProfile::sampled(kind, eps, {eps, 1.0}, {-kLog2, 0.0},
                                                     {1.0, 1.0});
  std::vector<double> values(nodes.size());
  std::vector<double> slopes(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    values[i] = proto.value_at(nodes[i]);
    slopes[i] = proto.slope_at(nodes[i]);
  }
  values.front() = -kLog2;
  return AmplitudeProfile::sampled(kind, eps, std::move(nodes), std::move(values),
                                   std::move(slopes));
}

}  // namespace

AmplitudeProfile profile_affine(const AnnulusSpec& spec, int n_nodes) {
  return sample_closed_form(ProfileKind::affine, spec, n_nodes);
}

AmplitudeProfile profile_p1(const AnnulusSpec& spec, int n_nodes) {
  return sample_closed_form(ProfileKind::p1_closed_form, spec, n_nodes);
}

AmplitudeProfile profile_minimax(const AnnulusSpec& spec, int n_nodes) {
  return sample_closed_form(ProfileKind::minimax, spec, n_nodes);
}

AmplitudeProfile solve_optimal_profile(const AnnulusSpec& spec, double p, int n_nodes,
                                       double tol) {
  require_p(p);
  if (n_nodes < 16) throw ValidationError("solve_optimal_profile needs n_nodes >= 16");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  const double eps = spec.epsilon();

  auto slope_for = [p](double c, double r) { return g_inverse(c / (r * r), p) / r; };
  // f(1; C) - 0 for the profile started at f(eps) = -log 2.
  auto terminal_value = [&](double c) {
    auto slope = [&](double r) { return slope_for(c, r); };
    return quad::integrate(slope, eps, 1.0, 1e-13, 1e-16).value - kLog2;
  };

  double c0 = 0.0;
  if (eps < 0.5) {
    double hi = 0.0;
    double lo = -1.0;
    int doublings = 0;
    while (terminal_value(lo) >= 0.0) {
      hi = lo;
      lo *= 2.0;
      if (++doublings > 200) {
        throw ConvergenceError("could not bracket the shooting constant; last bracket [" +
                               fmt(lo) + ", " + fmt(hi) + "]");
      }
    }
    double mid = 0.5 * (lo + hi);
    double residual = terminal_value(mid);
    for (int iter = 0; iter < 200; ++iter) {
      if (std::abs(residual) <= 1e-2 * tol) break;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lo)) break;
      if (residual > 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
      mid = 0.5 * (lo + hi);
      residual = terminal_value(mid);
    }
    if (std::abs(residual) > tol) {
      throw ConvergenceError("shooting did not reach f(1) = 0 (residual " + fmt(residual) +
                             "); last bracket [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    c0 = mid;
  }

  std::vector<double> nodes = uniform_nodes(eps, n_nodes);
  std::vector<double> values(nodes.size());
  std::vector<double> slopes(nodes.size());
  values[0] = -kLog2;
  for (std::size_t i = 0; i < nodes.size(); ++i) slopes[i] = slope_for(c0, nodes[i]);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (c0 == 0.0) {
      values[i] = std::log(nodes[i]);
      continue;
    }
    auto slope = [&](double r) { return slope_for(c0, r); };
    values[i] = values[i - 1] + quad::integrate(slope, nodes[i - 1], nodes[i], 1e-13, 1e-16).value;
  }
  return AmplitudeProfile::sampled(ProfileKind::optimal, eps, std::move(nodes), std::move(values),
                                   std::move(slopes), c0, p);
}

// ---------------------------------------------------------------------------
// Energies

EnergyReport energy_p(const AmplitudeProfile& profile, double p, double tol) {
  require_p(p);
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  for (double s : profile.slopes()) {
    if (!(s > 0.0)) throw InadmissibleProfileError("profile has a non-positive slope");
  }
  auto integrand = [&](double r) {
    const double t = r * profile.slope_at(r);
    return std::pow(1.0 / t + t, p) * r;
  };
  double value = 0.0;
  double error = 0.0;
  auto nodes = profile.nodes();
  if (profile.kind() == ProfileKind::custom) {
    // The interpolated slope has kinks at the nodes; integrate node to node.
    const double width = 1.0 - profile.epsilon();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double share = (nodes[i + 1] - nodes[i]) / width;
      auto r = quad::integrate(integrand, nodes[i], nodes[i + 1], tol, 1e-15 * share);
      value += r.value;
      error += r.error_estimate;
    }
  } else {
    auto r = quad::integrate(integrand, profile.epsilon(), 1.0, tol, 1e-15);
    value = r.value;
    error = r.error_estimate;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  return {PNorm::finite(p), two_pi * value, two_pi * error, profile.kind()};
}

EnergyReport energy_inf(const AmplitudeProfile& profile) {
  auto nodes = profile.nodes();
  auto slopes = profile.slopes();
  double worst = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(slopes[i] > 0.0)) throw InadmissibleProfileError("profile has a non-positive slope");
    worst = std::max(worst, radial_trace(nodes[i], slopes[i]));
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
    const double half = 0.5 * (nodes[i + 1] - nodes[i]);
    for (double x : quad::kGaussNodes) {
      const double r = mid + half * x;
      const double s = profile.slope_at(r);
      if (!(s > 0.0)) throw InadmissibleProfileError("profile has a non-positive slope");
      worst = std::max(worst, radial_trace(r, s));
    }
  }
  return {PNorm::infinity(), worst, 0.0, profile.kind()};
}

double el_residual(const AmplitudeProfile& profile, double p) {
  require_p(p);
  auto nodes = profile.nodes();
  auto slopes = profile.slopes();
  std::vector<double> q(nodes.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    q[i] = nodes[i] * nodes[i] * g_function(nodes[i] * slopes[i], p);
    mean += q[i];
  }
  mean /= static_cast<double>(q.size());
  double spread = 0.0;
  for (double v : q) spread = std::max(spread, std::abs(v - mean));
  return spread / (1.0 + std::abs(mean));
}

}  // namespace cloak::radial
