#ifndef PJM_SPECTRUM_HPP
#define PJM_SPECTRUM_HPP

// Band edges, critical points of the discriminant and Dirichlet eigenvalues.
//
// Layout on the real line (n = 1..N-1 indexes gaps, s_n = N - n):
//
//   lambda_0^+ < lambda_1^- <= lambda_1^+ < ... < lambda_{N-1}^+ < lambda_N^-
//
// with Delta'(lambda_n) = 0 and mu_n inside [lambda_n^-, lambda_n^+].  All
// roots are isolated by interval bracketing, never by companion matrices.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pjm/model.hpp"
#include "pjm/roots.hpp"
#include "pjm/transfer.hpp"

namespace pjm {

/// (-1)^k
inline constexpr double alternating(std::size_t k) noexcept { return k % 2 == 0 ? 1.0 : -1.0; }

struct SpectrumOptions {
  /// A gap counts as closed when sqrt((-1)^{s_n} Delta(lambda_n) - 2) is at
  /// most this many machine epsilons times the growth bound of the recursion
  /// at lambda_n, i.e. when its height is at rounding level.
  double closed_gap_factor = 1e3;
  /// Allowed excursion of mu_n outside [lambda_n^-, lambda_n^+], relative to B.
  double dirichlet_slack = 1e-8;
};

struct SpectralData {
  std::size_t n = 0;
  double bound = 0.0;            // B, encloses all edges
  Vector edges;                  // (lambda_0^+, lambda_1^-, lambda_1^+, ..., lambda_N^-)
  Vector critical;               // lambda_n, n = 1..N-1
  Vector dirichlet;              // mu_n, n = 1..N-1
  Vector crest_excess;           // (-1)^{s_n} Delta(lambda_n) - 2 >= 0
  std::vector<bool> gap_closed;  // per gap

  std::size_t gaps() const noexcept { return n - 1; }
  // Gap accessors take the 1-based gap index n = 1..N-1.
  double lower(std::size_t gap) const { return edges[2 * gap - 1]; }
  double upper(std::size_t gap) const { return edges[2 * gap]; }
  // Band sigma_k = [lambda_{k-1}^+, lambda_k^-], k = 1..N.
  double band_begin(std::size_t band) const { return edges[2 * band - 2]; }
  double band_end(std::size_t band) const { return edges[2 * band - 1]; }
  /// (-1)^{s_n} for gap n.
  double gap_sign(std::size_t gap) const { return alternating(n - gap); }
  double width() const { return edges.back() - edges.front(); }
};

/// max_n (|b_n| + a_{n-1} + a_n); every band edge lies in [-B, B].
inline double spectral_bound(const CoefficientPoint& p) {
  require_valid(p);
  const Vector a = p.off_diagonal();
  double bound = 0.0;
  for (std::size_t k = 0; k < p.n; ++k) {
    const double a_prev = a[k == 0 ? p.n - 1 : k - 1];
    bound = std::max(bound, std::abs(p.b[k]) + a_prev + a[k]);
  }
  return bound;
}

namespace detail {

inline double outer_limit(double bound) { return bound + 1.0; }

/// Zeros of Delta' by the derivative cascade: Delta is monic of degree N, so
/// Delta^{(N-1)} is linear, and the zeros of each Delta^{(k)} interlace those
/// of Delta^{(k+1)}.
inline Vector critical_points(const Recurrence& rec, double bound) {
  const std::size_t n = rec.period();
  const double outer = outer_limit(bound);
  const double abs_tol = std::numeric_limits<double>::epsilon() * bound;

  // Level N-1: c_{N-1}(lambda) + c_N(lambda) * t is the linear Taylor model.
  const Vector c0 = rec.delta_taylor(0.0, static_cast<int>(n));
  Vector roots{-c0[n - 1] / (static_cast<double>(n) * c0[n])};

  for (std::size_t k = n - 2; k >= 1; --k) {
    const int order = static_cast<int>(k);
    auto level = [&](double lambda) {
      const Vector c = rec.delta_taylor(lambda, order + 1);
      return std::pair<double, double>{c[k], static_cast<double>(k + 1) * c[k + 1]};
    };
    Vector next;
    next.reserve(roots.size() + 1);
    for (std::size_t i = 0; i <= roots.size(); ++i) {
      const double lo = i == 0 ? -outer : roots[i - 1];
      const double hi = i == roots.size() ? outer : roots[i];
      next.push_back(bracketed_root(level, lo, hi, abs_tol,
                                    "derivative cascade, order " + std::to_string(k)));
    }
    roots = std::move(next);
  }
  for (std::size_t i = 1; i < roots.size(); ++i) {
    if (!(roots[i] > roots[i - 1])) {
      throw ResolutionError("critical points are numerically coincident", roots[i - 1], roots[i]);
    }
  }
  return roots;
}

/// Sturm count: eigenvalues below x of the truncated matrix with diagonal
/// (b_2..b_N) and off-diagonal (a_2..a_{N-1}).
inline std::size_t sturm_count(const Recurrence& rec, double x) {
  const Vector& a = rec.a();
  const Vector& b = rec.b();
  const std::size_t m = rec.period() - 1;
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = b[i + 1];
    q = i == 0 ? d - x : d - x - a[i] * a[i] / q;
    if (q == 0.0) q = -std::numeric_limits<double>::epsilon() * (std::abs(d) + std::abs(x) + 1.0);
    if (q < 0.0) ++count;
  }
  return count;
}

} // namespace detail

inline Vector critical_points(const CoefficientPoint& p) {
  const double bound = spectral_bound(p);
  return detail::critical_points(detail::Recurrence(p), bound);
}

namespace detail {

inline SpectralData band_edges(const Recurrence& rec, double bound, const Vector& critical,
                               const SpectrumOptions& opts) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t n = rec.period();
  SpectralData sd;
  sd.n = n;
  sd.bound = bound;
  sd.critical = critical;
  sd.crest_excess.assign(n - 1, 0.0);
  sd.gap_closed.assign(n - 1, false);
  sd.edges.assign(2 * n, 0.0);

  for (std::size_t gap = 1; gap < n; ++gap) {
    const double sign = alternating(n - gap);
    const double lambda = critical[gap - 1];
    const double excess = sign * rec.delta_minus(lambda, 2.0 * sign);
    const double floor = opts.closed_gap_factor * eps * rec.magnitude(lambda);
    if (excess <= floor * floor) {
      sd.gap_closed[gap - 1] = true;
      sd.crest_excess[gap - 1] = 0.0;
    } else {
      sd.crest_excess[gap - 1] = excess;
    }
  }

  const double outer = outer_limit(bound);
  const double abs_tol = eps * bound;
  for (std::size_t band = 1; band <= n; ++band) {
    // (-1)^{s_{band-1}} Delta decreases from >= 2 to <= -2 on [lo, hi].
    const double sign = alternating(n - band + 1);
    const double lo = band == 1 ? -outer : critical[band - 2];
    const double hi = band == n ? outer : critical[band - 1];
    auto shifted = [&](double target) {
      return [&rec, sign, target](double lambda) {
        Vector tn, tn1, fn, fn1;
        rec.taylor(lambda, 1, 1.0, 0.0, tn, tn1);
        rec.taylor(lambda, 1, 0.0, 1.0, fn, fn1);
        const double minus = Recurrence::minus_from({tn[0], tn1[0], fn[0], fn1[0]}, sign * target);
        return std::pair<double, double>{sign * minus, sign * (tn[1] + fn1[1])};
      };
    };
    auto upper = shifted(2.0);  // signed Delta - 2
    auto lower = shifted(-2.0); // signed Delta + 2
    auto monotonicity_error = [band] {
      return NumericalError("band " + std::to_string(band) +
                            ": signed discriminant is not monotone between critical points");
    };
    // lambda_{band-1}^+ sits at index 2(band-1); lambda_band^- at 2 band - 1.
    if (band >= 2 && sd.gap_closed[band - 2]) {
      sd.edges[2 * band - 2] = lo;
    } else {
      if (upper(lo).first < 0.0) throw monotonicity_error();
      sd.edges[2 * band - 2] = bracketed_root(upper, lo, hi, abs_tol, "band edge crossing +2");
    }
    if (band <= n - 1 && sd.gap_closed[band - 1]) {
      sd.edges[2 * band - 1] = hi;
    } else {
      if (lower(hi).first > 0.0) throw monotonicity_error();
      sd.edges[2 * band - 1] = bracketed_root(lower, lo, hi, abs_tol, "band edge crossing -2");
    }
  }
  return sd;
}

inline Vector dirichlet_eigenvalues(const Recurrence& rec, const SpectralData& sd,
                                    const SpectrumOptions& opts) {
  const std::size_t n = rec.period();
  const std::size_t m = n - 1;
  const double bound = sd.bound;
  const double outer = outer_limit(bound);
  if (sturm_count(rec, -outer) != 0 || sturm_count(rec, outer) != m) {
    throw NumericalError("Sturm count does not match N-1 Dirichlet eigenvalues");
  }
  // Sturm bisection down to adjacent doubles.  The LDL^T count is backward
  // stable; a Newton polish on theta_{N+1} is not, since the forward recursion
  // loses the decaying Dirichlet eigenvector.
  Vector mu(m);
  for (std::size_t k = 1; k <= m; ++k) {
    double lo = -outer;
    double hi = outer;
    for (;;) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (sturm_count(rec, mid) >= k) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    mu[k - 1] = hi;
    if (k > 1 && !(mu[k - 1] > mu[k - 2])) {
      throw ResolutionError("Dirichlet eigenvalues are numerically coincident", mu[k - 2], mu[k - 1]);
    }
  }

  const double slack = opts.dirichlet_slack * bound;
  for (std::size_t gap = 1; gap <= m; ++gap) {
    double& value = mu[gap - 1];
    if (sd.gap_closed[gap - 1]) {
      value = sd.critical[gap - 1];
      continue;
    }
    const double lower = sd.lower(gap);
    const double upper = sd.upper(gap);
    if (value < lower - slack || value > upper + slack) {
      throw NumericalError("Dirichlet eigenvalue " + std::to_string(gap) +
                           " lies outside its gap: inconsistent spectral data");
    }
    value = std::clamp(value, lower, upper);
  }
  return mu;
}

} // namespace detail

/// Critical points, band edges and gap status.  `dirichlet` is left empty.
inline SpectralData band_edges(const CoefficientPoint& p, const SpectrumOptions& opts = {}) {
  const double bound = spectral_bound(p);
  const detail::Recurrence rec(p);
  return detail::band_edges(rec, bound, detail::critical_points(rec, bound), opts);
}

/// Zeros of theta_{N+1}, one per gap closure.
inline Vector dirichlet_eigenvalues(const CoefficientPoint& p, const SpectralData& edges,
                                    const SpectrumOptions& opts = {}) {
  require_valid(p);
  return detail::dirichlet_eigenvalues(detail::Recurrence(p), edges, opts);
}

/// Full spectral data of p.
inline SpectralData spectral_data(const CoefficientPoint& p, const SpectrumOptions& opts = {}) {
  const double bound = spectral_bound(p);
  const detail::Recurrence rec(p);
  SpectralData sd = detail::band_edges(rec, bound, detail::critical_points(rec, bound), opts);
  sd.dirichlet = detail::dirichlet_eigenvalues(rec, sd, opts);
  return sd;
}

} // namespace pjm

#endif // PJM_SPECTRUM_HPP
