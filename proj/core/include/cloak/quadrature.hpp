#pragma once

#include <array>
#include <functional>

namespace cloak::quad {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

// 7-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 7> kGaussNodes = {
    -0.9491079123427585245261897, -0.7415311855993944398638648, -0.4058451513773971669066064, 0.0,
    0.4058451513773971669066064,  0.7415311855993944398638648,  0.9491079123427585245261897};
inline constexpr std::array<double, 7> kGaussWeights = {
    0.1294849661688696932706114, 0.2797053914892766679014678, 0.3818300505051189449503698,
    0.4179591836734693877551020, 0.3818300505051189449503698, 0.2797053914892766679014678,
    0.1294849661688696932706114};

// Single 7-point panel on [a, b].
template <class F>
double gauss7(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
    sum += kGaussWeights[k] * f(mid + half * kGaussNodes[k]);
  }
  return sum * half;
}

// Composite 7-point Gauss-Legendre with recursive bisection: a panel is
// accepted once it agrees with the sum of its two halves to within
// max(abs_tol, rel_tol * |panel|) scaled by the panel's share of [a, b].
// Throws ConvergenceError when max_depth is exhausted before the tolerance
// is met.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-9, double abs_tol = 1e-14, int max_depth = 40);

}  // namespace cloak::quad
