#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

double bisection_g_inverse(double s, double p) {
  auto g = [p](double t) { return std::pow(1.0 / t + t, p - 1.0) * (1.0 - 1.0 / (t * t)); };
  double lo = 1.0;
  double hi = 1.0;
  while (g(lo) > s) lo *= 0.5;
  while (g(hi) < s) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DiscreteProfile brute_force_minimizer(double epsilon, double p, int n_nodes) {
  const int n = n_nodes;
  const double dr = (1.0 - epsilon) / (n - 1);
  const double total = std::log(2.0);
  std::vector<double> r(static_cast<std::size_t>(n)), w(r.size());
  for (int i = 0; i < n; ++i) {
    r[static_cast<std::size_t>(i)] = epsilon + i * dr;
    w[static_cast<std::size_t>(i)] = (i == 0 || i == n - 1) ? 0.5 * dr : dr;
  }
  r.back() = 1.0;

  // Node term 2 pi r (1/t + t)^p with t = r g, and its derivatives in g.
  auto term = [&](std::size_t i, double g, double* d1, double* d2) {
    const double ri = r[i];
    const double t = ri * g;
    const double h = 1.0 / t + t;
    const double h1 = 1.0 - 1.0 / (t * t);
    const double h2 = 2.0 / (t * t * t);
    const double c = 2.0 * std::numbers::pi * ri;
    if (d1) *d1 = c * p * std::pow(h, p - 1.0) * h1 * ri;
    if (d2) {
      *d2 = c * p * ((p - 1.0) * std::pow(h, p - 2.0) * h1 * h1 + std::pow(h, p - 1.0) * h2) * ri * ri;
    }
    return c * std::pow(h, p);
  };
  auto energy = [&](const std::vector<double>& g) {
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e += w[i] * term(i, g[i], nullptr, nullptr);
    return e;
  };

  // Start from the affine-in-log guess g = total / (r log(1/eps)).
  std::vector<double> g(r.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0 / r[i];
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) mass += w[i] * g[i];
  for (double& gi : g) gi *= total / mass;

  DiscreteProfile out;
  std::vector<double> d1(g.size()), d2(g.size()), step(g.size()), trial(g.size());
  for (int it = 0; it < 500; ++it) {
    for (std::size_t i = 0; i < g.size(); ++i) term(i, g[i], &d1[i], &d2[i]);
    // Gradient of E is w_i d1_i; with metric diag(w_i d2_i) the projection
    // onto sum w_i step_i = 0 shifts d1 by a common multiplier lambda.
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      num += w[i] * d1[i] / d2[i];
      den += w[i] / d2[i];
    }
    const double lambda = num / den;
    double stat = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) stat = std::max(stat, std::abs(d1[i] - lambda));
    out.stationarity = stat / (1.0 + std::abs(lambda));
    out.iterations = it;
    if (out.stationarity <= 1e-12) break;

    double slope = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      step[i] = -(d1[i] - lambda) / d2[i];
      slope += w[i] * d1[i] * step[i];
    }
    const double e0 = energy(g);
    double alpha = 1.0;
    while (true) {
      bool positive = true;
      for (std::size_t i = 0; i < g.size(); ++i) {
        trial[i] = g[i] + alpha * step[i];
        positive = positive && trial[i] > 0.0;
      }
      if (positive && energy(trial) <= e0 + 1e-4 * alpha * slope) break;
      alpha *= 0.5;
      if (alpha < 1e-20) throw std::runtime_error("line search stalled");
    }
    g.swap(trial);
  }

  out.nodes = r;
  out.values.assign(r.size(), -total);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    out.values[i + 1] = out.values[i] + 0.5 * (g[i] + g[i + 1]) * (r[i + 1] - r[i]);
  }
  return out;
}

cloak::radial::AmplitudeProfile random_admissible_profile(double epsilon, int n_nodes,
                                                          std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto nodes = cloak::radial::uniform_nodes(epsilon, n_nodes);
  std::vector<double> slopes(nodes.size());
  for (double& s : slopes) s = std::exp(normal(rng));
  // Piecewise-linear slopes integrate by the trapezoid rule exactly.
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    integral += 0.5 * (slopes[i] + slopes[i + 1]) * (nodes[i + 1] - nodes[i]);
  }
  for (double& s : slopes) s *= std::log(2.0) / integral;
  return cloak::radial::AmplitudeProfile::custom(epsilon, std::move(nodes), std::move(slopes));
}

double p1_slope(double r, double epsilon) {
  const double k = 16.0 * (2.0 - epsilon) * (0.5 - epsilon);
  return 1.0 / std::sqrt(r * r + k / 9.0);
}

}  // namespace oracle
