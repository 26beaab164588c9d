#include "cloak/quadrature.hpp"

#include <cmath>
#include <string>

#include "cloak/errors.hpp"

namespace cloak::quad {
namespace {

struct Adaptive {
  const std::function<double(double)>& f;
  double rel_tol;
  double abs_tol;
  double total_width;
  int max_depth;
  int evaluations = 0;
  double error = 0.0;
  bool exhausted = false;

  double panel(double a, double b) {
    evaluations += 7;
    return gauss7(f, a, b);
  }

  double refine(double a, double b, double whole, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = panel(a, mid);
    const double right = panel(mid, b);
    const double halves = left + right;
    if (!std::isfinite(halves)) {
      throw ConvergenceError("non-finite integrand near x = " + std::to_string(mid));
    }
    const double diff = std::abs(halves - whole);
    const double share = (b - a) / total_width;
    const double allowed = std::max(abs_tol * share, rel_tol * std::abs(halves));
    if (diff <= allowed || depth >= max_depth) {
      if (diff > allowed) exhausted = true;
      // The halves are far more accurate than the comparison suggests for
      // smooth integrands; diff bounds the error of `whole`, not `halves`.
      error += diff;
      return halves;
    }
    return refine(a, mid, left, depth + 1) + refine(mid, b, right, depth + 1);
  }
};

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     double abs_tol, int max_depth) {
  if (a == b) return {};
  Adaptive state{f, rel_tol, abs_tol, std::abs(b - a), max_depth};
  const double whole = state.panel(a, b);
  const double value = state.refine(a, b, whole, 0);
  if (state.exhausted || !std::isfinite(value)) {
    throw ConvergenceError("adaptive quadrature did not converge on [" + std::to_string(a) +
                           ", " + std::to_string(b) + "]");
  }
  return {value, state.error, state.evaluations};
}

}  // namespace cloak::quad
