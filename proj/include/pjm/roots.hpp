#ifndef PJM_ROOTS_HPP
#define PJM_ROOTS_HPP

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "pjm/errors.hpp"

namespace pjm::detail {

/// Bisection safeguarded Newton iteration on a sign-changing bracket.
/// `f(x)` returns (value, derivative).  Newton steps are taken only when they
/// stay inside the current bracket and shrink faster than bisection would.
/// Stops when the bracket width reaches `abs_tol` or a few ulps of the root.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double abs_tol, const std::string& what) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto [f_lo, d_lo] = f(lo);
  auto [f_hi, d_hi] = f(hi);
  (void)d_lo;
  (void)d_hi;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) throw ResolutionError(what + ": no sign change", lo, hi);
  const bool lo_positive = f_lo > 0.0;

  double x = 0.5 * (lo + hi);
  double step_old = hi - lo;
  double step = step_old;
  auto [fx, dfx] = f(x);
  for (int it = 0; it < 300; ++it) {
    if (fx == 0.0) return x;
    if ((fx > 0.0) == lo_positive) {
      lo = x;
    } else {
      hi = x;
    }
    const double width_tol = std::max(abs_tol, 4.0 * eps * std::max(std::abs(lo), std::abs(hi)));
    double candidate = x;
    bool newton = false;
    if (dfx != 0.0 && std::isfinite(dfx)) {
      candidate = x - fx / dfx;
      newton = candidate > lo && candidate < hi && std::abs(candidate - x) < 0.5 * std::abs(step_old);
    }
    step_old = step;
    if (!newton) {
      candidate = 0.5 * (lo + hi);
    }
    step = candidate - x;
    if (hi - lo <= width_tol || std::abs(step) <= 2.0 * eps * std::abs(x)) {
      // Converged: x is within the tolerance, take the final iterate.
      if (newton) return candidate;
      return x;
    }
    x = candidate;
    std::tie(fx, dfx) = f(x);
  }
  return x;
}

} // namespace pjm::detail

#endif // PJM_ROOTS_HPP
