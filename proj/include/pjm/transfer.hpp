#ifndef PJM_TRANSFER_HPP
#define PJM_TRANSFER_HPP

// Fundamental solutions of a_{n-1} y_{n-1} + a_n y_{n+1} + b_n y_n = lambda y_n,
//
//   theta: theta_0 = 1, theta_1 = 0        phi: phi_0 = 0, phi_1 = 1,
//
// the discriminant Delta = phi_{N+1} + theta_N, its lambda-derivatives and its
// gradients with respect to the coefficients.  Everything is a plain forward
// run of the recursion in double precision; for large N log|lambda| the
// values overflow like |lambda|^N and no rescaling is attempted.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pjm/model.hpp"

namespace pjm {

/// Values at indices N and N+1 with their lambda-derivatives.
struct SolutionFrame {
  static constexpr int kMaxOrder = 3;

  double lambda = 0.0;
  int order = 0;
  // Entry k holds the k-th lambda-derivative, k = 0..order; NaN above order.
  std::array<double, 4> theta_n{};
  std::array<double, 4> theta_n1{};
  std::array<double, 4> phi_n{};
  std::array<double, 4> phi_n1{};
  double delta = 0.0;
  std::optional<double> delta_d1;
  std::optional<double> delta_d2;
  std::optional<double> delta_d3;

  /// theta_N phi_{N+1} - theta_{N+1} phi_N, identically 1.
  double wronskian() const { return theta_n[0] * phi_n1[0] - theta_n1[0] * phi_n[0]; }
};

/// Partial derivatives of a scalar functional with respect to x_k and b_k,
/// at fixed lambda, in full (unreduced) coordinates.
struct ParamGradient {
  Vector d_x;
  Vector d_b;
};

enum class Functional { delta, delta_d1, theta_n, theta_n1, phi_n, phi_n1 };

struct TransferGradients {
  ParamGradient theta_n;
  ParamGradient theta_n1;
  ParamGradient phi_n;
  ParamGradient phi_n1;
  ParamGradient delta;
  ParamGradient delta_d1;

  const ParamGradient& operator[](Functional f) const {
    switch (f) {
    case Functional::delta: return delta;
    case Functional::delta_d1: return delta_d1;
    case Functional::theta_n: return theta_n;
    case Functional::theta_n1: return theta_n1;
    case Functional::phi_n: return phi_n;
    case Functional::phi_n1: return phi_n1;
    }
    return delta;
  }
};

namespace detail {

/// The recursion with a_k = exp(x_k) cached.  No validation; callers check p.
class Recurrence {
public:
  explicit Recurrence(const CoefficientPoint& p) : n_(p.n), a_(p.off_diagonal()), b_(p.b) {}

  std::size_t period() const noexcept { return n_; }
  const Vector& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }

  /// Taylor coefficients in lambda (k-th derivative / k!) of y_N and y_{N+1},
  /// orders 0..order, for the solution with initial data (y_0, y_1).
  void taylor(double lambda, int order, double y0, double y1, Vector& at_n, Vector& at_n1) const {
    const auto m = static_cast<std::size_t>(order) + 1;
    Vector prev(m, 0.0), cur(m, 0.0), next(m, 0.0);
    prev[0] = y0;
    cur[0] = y1;
    for (std::size_t n = 1; n <= n_; ++n) {
      const double a_prev = a_[n == 1 ? n_ - 1 : n - 2];
      const double a_cur = a_[n - 1];
      const double shift = lambda - b_[n - 1];
      next[0] = (shift * cur[0] - a_prev * prev[0]) / a_cur;
      for (std::size_t j = 1; j < m; ++j) {
        next[j] = (shift * cur[j] + cur[j - 1] - a_prev * prev[j]) / a_cur;
      }
      std::swap(prev, cur);
      std::swap(cur, next);
    }
    at_n = std::move(prev);
    at_n1 = std::move(cur);
  }

  /// Values (theta_N, theta_{N+1}, phi_N, phi_{N+1}).
  std::array<double, 4> values(double lambda) const {
    double t0 = 1.0, t1 = 0.0, f0 = 0.0, f1 = 1.0;
    for (std::size_t n = 1; n <= n_; ++n) {
      const double a_prev = a_[n == 1 ? n_ - 1 : n - 2];
      const double a_cur = a_[n - 1];
      const double shift = lambda - b_[n - 1];
      const double t2 = (shift * t1 - a_prev * t0) / a_cur;
      const double f2 = (shift * f1 - a_prev * f0) / a_cur;
      t0 = t1;
      t1 = t2;
      f0 = f1;
      f1 = f2;
    }
    return {t0, t1, f0, f1};
  }

  double delta(double lambda) const {
    const auto v = values(lambda);
    return v[0] + v[3];
  }

  /// Taylor coefficients of Delta up to `order`.
  Vector delta_taylor(double lambda, int order) const {
    Vector tn, tn1, fn, fn1;
    taylor(lambda, order, 1.0, 0.0, tn, tn1);
    taylor(lambda, order, 0.0, 1.0, fn, fn1);
    for (std::size_t j = 0; j < tn.size(); ++j) tn[j] += fn1[j];
    return tn;
  }

  /// Delta and Delta^2 - 4.  The latter uses the Wronskian identity,
  ///   Delta^2 - 4 = (theta_N - phi_{N+1})^2 + 4 theta_{N+1} phi_N,
  /// whose terms are all small where the monodromy is close to +-I, so the
  /// excess keeps its relative accuracy next to a closed gap.
  std::pair<double, double> delta_excess(double lambda) const {
    const auto v = values(lambda);
    const double diff = v[0] - v[3];
    return {v[0] + v[3], diff * diff + 4.0 * v[1] * v[2]};
  }

  /// Delta - target for target = +-2 from the monodromy entries
  /// {theta_N, theta_{N+1}, phi_N, phi_{N+1}}.  The excess form is used when
  /// Delta has the sign of the target and its rounding bound is the smaller
  /// one; with large entries the excess cancels and the plain difference wins.
  static double minus_from(const std::array<double, 4>& v, double target) {
    const double d = v[0] + v[3];
    if (d * target > 0.0) {
      const double diff = v[0] - v[3];
      const double cross = 4.0 * v[1] * v[2];
      const double bound_excess = (diff * diff + std::abs(cross)) / std::abs(d + target);
      const double bound_plain = std::abs(v[0]) + std::abs(v[3]) + 2.0;
      if (bound_excess <= bound_plain) return (diff * diff + cross) / (d + target);
    }
    return d - target;
  }

  double delta_minus(double lambda, double target) const {
    return minus_from(values(lambda), target);
  }

  /// Growth bound of the recursion run on absolute values.  Rounding errors
  /// of theta and phi at index N, N+1 are a modest multiple of eps times this.
  double magnitude(double lambda) const {
    double t0 = 1.0, t1 = 0.0, f0 = 0.0, f1 = 1.0;
    for (std::size_t n = 1; n <= n_; ++n) {
      const double a_prev = a_[n == 1 ? n_ - 1 : n - 2];
      const double a_cur = a_[n - 1];
      const double shift = std::abs(lambda) + std::abs(b_[n - 1]);
      const double t2 = (shift * t1 + a_prev * t0) / a_cur;
      const double f2 = (shift * f1 + a_prev * f0) / a_cur;
      t0 = t1;
      t1 = t2;
      f0 = f1;
      f1 = f2;
    }
    return std::max({t0, t1, f0, f1, 1.0});
  }

  SolutionFrame frame(double lambda, int order) const {
    SolutionFrame fr;
    fr.lambda = lambda;
    fr.order = order;
    Vector tn, tn1, fn, fn1;
    taylor(lambda, order, 1.0, 0.0, tn, tn1);
    taylor(lambda, order, 0.0, 1.0, fn, fn1);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    fr.theta_n.fill(nan);
    fr.theta_n1.fill(nan);
    fr.phi_n.fill(nan);
    fr.phi_n1.fill(nan);
    double factorial = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) factorial *= k;
      const auto j = static_cast<std::size_t>(k);
      fr.theta_n[j] = factorial * tn[j];
      fr.theta_n1[j] = factorial * tn1[j];
      fr.phi_n[j] = factorial * fn[j];
      fr.phi_n1[j] = factorial * fn1[j];
    }
    fr.delta = fr.phi_n1[0] + fr.theta_n[0];
    if (order >= 1) fr.delta_d1 = fr.phi_n1[1] + fr.theta_n[1];
    if (order >= 2) fr.delta_d2 = fr.phi_n1[2] + fr.theta_n[2];
    if (order >= 3) fr.delta_d3 = fr.phi_n1[3] + fr.theta_n[3];
    return fr;
  }

  /// Forward-mode tangents of the recursion for all 2N parameters.
  TransferGradients gradients(double lambda) const {
    const std::size_t n = n_;
    // Primal sequences y_0..y_{N+1} and their lambda-derivatives.
    auto run = [&](double y0, double y1, Vector& y, Vector& yp) {
      y.assign(n + 2, 0.0);
      yp.assign(n + 2, 0.0);
      y[0] = y0;
      y[1] = y1;
      for (std::size_t k = 1; k <= n; ++k) {
        const double a_prev = a_[k == 1 ? n - 1 : k - 2];
        const double a_cur = a_[k - 1];
        const double shift = lambda - b_[k - 1];
        y[k + 1] = (shift * y[k] - a_prev * y[k - 1]) / a_cur;
        yp[k + 1] = (shift * yp[k] + y[k] - a_prev * yp[k - 1]) / a_cur;
      }
    };
    Vector ty, typ, fy, fyp;
    run(1.0, 0.0, ty, typ);
    run(0.0, 1.0, fy, fyp);

    TransferGradients g;
    for (ParamGradient* pg : {&g.theta_n, &g.theta_n1, &g.phi_n, &g.phi_n1, &g.delta, &g.delta_d1}) {
      pg->d_x.assign(n, 0.0);
      pg->d_b.assign(n, 0.0);
    }

    // Tangent of (y_N, y_{N+1}, y'_N, y'_{N+1}) for parameter (is_x, k).
    auto tangent = [&](const Vector& y, const Vector& yp, bool is_x, std::size_t q) {
      double t_prev = 0.0, t_cur = 0.0, tp_prev = 0.0, tp_cur = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t i_prev = (k == 1 ? n - 1 : k - 2);
        const std::size_t i_cur = k - 1;
        const double a_prev = a_[i_prev];
        const double a_cur = a_[i_cur];
        const double shift = lambda - b_[i_cur];
        const double da_prev = (is_x && i_prev == q) ? a_prev : 0.0;
        const double da_cur = (is_x && i_cur == q) ? a_cur : 0.0;
        const double db = (!is_x && i_cur == q) ? 1.0 : 0.0;
        const double t_next = (shift * t_cur - a_prev * t_prev - db * y[k] - da_prev * y[k - 1] -
                               da_cur * y[k + 1]) /
                              a_cur;
        const double tp_next = (shift * tp_cur + t_cur - a_prev * tp_prev - db * yp[k] -
                                da_prev * yp[k - 1] - da_cur * yp[k + 1]) /
                               a_cur;
        t_prev = t_cur;
        t_cur = t_next;
        tp_prev = tp_cur;
        tp_cur = tp_next;
      }
      return std::array<double, 4>{t_prev, t_cur, tp_prev, tp_cur};
    };

    for (int half = 0; half < 2; ++half) {
      const bool is_x = half == 0;
      for (std::size_t q = 0; q < n; ++q) {
        const auto th = tangent(ty, typ, is_x, q);
        const auto ph = tangent(fy, fyp, is_x, q);
        auto put = [&](ParamGradient& pg, double value) { (is_x ? pg.d_x : pg.d_b)[q] = value; };
        put(g.theta_n, th[0]);
        put(g.theta_n1, th[1]);
        put(g.phi_n, ph[0]);
        put(g.phi_n1, ph[1]);
        put(g.delta, th[0] + ph[1]);
        put(g.delta_d1, th[2] + ph[3]);
      }
    }
    return g;
  }

private:
  std::size_t n_;
  Vector a_;
  Vector b_;
};

inline void require_finite(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("spectral parameter must be finite");
}

} // namespace detail

/// Fundamental solutions at indices N, N+1 and Delta with lambda-derivatives
/// up to `deriv_order` (0..3).
inline SolutionFrame evaluate(const CoefficientPoint& p, double lambda, int deriv_order = 0) {
  require_valid(p);
  detail::require_finite(lambda);
  if (deriv_order < 0 || deriv_order > SolutionFrame::kMaxOrder) {
    throw DomainError("evaluate: derivative order must be in 0..3");
  }
  return detail::Recurrence(p).frame(lambda, deriv_order);
}

inline double discriminant(const CoefficientPoint& p, double lambda) {
  require_valid(p);
  detail::require_finite(lambda);
  return detail::Recurrence(p).delta(lambda);
}

/// Gradients of theta_N, theta_{N+1}, phi_N, phi_{N+1}, Delta and Delta'
/// with respect to (x, b), all from one pass.
inline TransferGradients param_gradients(const CoefficientPoint& p, double lambda) {
  require_valid(p);
  detail::require_finite(lambda);
  return detail::Recurrence(p).gradients(lambda);
}

inline ParamGradient param_gradient(const CoefficientPoint& p, double lambda, Functional which) {
  return param_gradients(p, lambda)[which];
}

/// Chain rule onto the chart (u, v): d/du_k = d/dx_k - d/dx_N, same for v.
inline Vector reduce_gradient(const ParamGradient& g) {
  const std::size_t n = g.d_x.size();
  Vector out(2 * (n - 1));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out[k] = g.d_x[k] - g.d_x[n - 1];
    out[n - 1 + k] = g.d_b[k] - g.d_b[n - 1];
  }
  return out;
}

} // namespace pjm

#endif // PJM_TRANSFER_HPP
