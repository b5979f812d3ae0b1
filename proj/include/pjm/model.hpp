#ifndef PJM_MODEL_HPP
#define PJM_MODEL_HPP

// Coefficient manifold of N-periodic Jacobi matrices normalized to
// prod a_k = 1 and sum b_k = 0, written in logarithmic coordinates
// x_k = log a_k.  A point is p = (x, b) with both halves summing to zero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pjm/errors.hpp"

namespace pjm {

using Vector = std::vector<double>;

struct CoefficientPoint {
  std::size_t n = 0; // period N
  Vector x;          // x_k = log a_k, k = 1..N (stored 0-based)
  Vector b;          // diagonal b_k, k = 1..N

  /// Off-diagonal a_k = exp(x_k), 0-based; a_0 of the recursion is a_N.
  Vector off_diagonal() const {
    Vector a(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) a[k] = std::exp(x[k]);
    return a;
  }

  bool operator==(const CoefficientPoint&) const = default;
};

/// Chart on the manifold: the first N-1 entries of x and b.
struct ReducedPoint {
  Vector u;
  Vector v;

  std::size_t dim() const noexcept { return u.size() + v.size(); }

  /// Concatenation (u, v), the column ordering used by Jacobians.
  Vector flat() const {
    Vector out(u);
    out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  static ReducedPoint from_flat(const Vector& w) {
    const auto half = static_cast<std::ptrdiff_t>(w.size() / 2);
    return {Vector(w.begin(), w.begin() + half), Vector(w.begin() + half, w.end())};
  }

  bool operator==(const ReducedPoint&) const = default;
};

struct Validation {
  bool ok = true;
  std::string violated; // empty when ok
  double residual = 0.0;

  explicit operator bool() const noexcept { return ok; }
};

inline constexpr double kZeroSumTolerance = 1e-12;

inline Validation validate(const CoefficientPoint& p) {
  if (p.n < 2) return {false, "period N >= 2", static_cast<double>(p.n)};
  if (p.x.size() != p.n) return {false, "size of x equals N", static_cast<double>(p.x.size())};
  if (p.b.size() != p.n) return {false, "size of b equals N", static_cast<double>(p.b.size())};
  for (std::size_t k = 0; k < p.n; ++k) {
    if (!std::isfinite(p.x[k])) return {false, "x finite", p.x[k]};
    if (!std::isfinite(p.b[k])) return {false, "b finite", p.b[k]};
  }
  const double tol = kZeroSumTolerance * static_cast<double>(p.n);
  const double sx = std::accumulate(p.x.begin(), p.x.end(), 0.0);
  if (std::abs(sx) > tol) return {false, "sum of x equals 0", sx};
  const double sb = std::accumulate(p.b.begin(), p.b.end(), 0.0);
  if (std::abs(sb) > tol) return {false, "sum of b equals 0", sb};
  return {};
}

/// Throws DomainError naming the violated constraint.
inline void require_valid(const CoefficientPoint& p) {
  if (auto check = validate(p); !check) {
    throw DomainError("invalid coefficient point: " + check.violated +
                      " violated (residual " + std::to_string(check.residual) + ")");
  }
}

inline ReducedPoint reduce(const CoefficientPoint& p) {
  require_valid(p);
  const auto m = static_cast<std::ptrdiff_t>(p.n - 1);
  return {Vector(p.x.begin(), p.x.begin() + m), Vector(p.b.begin(), p.b.begin() + m)};
}

/// Inverse chart.  The last entries are computed, so the result satisfies
/// both zero-sum constraints up to the rounding of one summation.
inline CoefficientPoint embed(const ReducedPoint& r, std::size_t n_period) {
  if (n_period < 2) throw DomainError("embed: period must be >= 2");
  if (r.u.size() != n_period - 1 || r.v.size() != n_period - 1) {
    throw DomainError("embed: reduced coordinates must have N-1 = " +
                      std::to_string(n_period - 1) + " entries each");
  }
  CoefficientPoint p{n_period, r.u, r.v};
  p.x.push_back(-std::accumulate(r.u.begin(), r.u.end(), 0.0));
  p.b.push_back(-std::accumulate(r.v.begin(), r.v.end(), 0.0));
  return p;
}

/// Subtracts the mean from each half.  Used to remove drift after arithmetic.
inline CoefficientPoint project(CoefficientPoint p) {
  auto center = [](Vector& w) {
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    for (double& e : w) e -= mean;
  };
  center(p.x);
  center(p.b);
  return p;
}

inline CoefficientPoint zero_point(std::size_t n_period) {
  if (n_period < 2) throw DomainError("period must be >= 2");
  return {n_period, Vector(n_period, 0.0), Vector(n_period, 0.0)};
}

/// Entries uniform in [-scale, scale], then projected to zero mean.  The
/// last entries are recomputed through embed() so that
/// embed(reduce(p)) == p holds bit for bit on generated points.
/// The mapping from the 64-bit Mersenne twister to doubles is done by hand
/// so that the output is identical across standard library implementations.
inline CoefficientPoint random_point(std::size_t n_period, double scale, std::uint64_t seed) {
  if (n_period < 2) throw DomainError("random_point: period must be >= 2");
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw DomainError("random_point: scale must be finite and non-negative");
  }
  std::mt19937_64 engine(seed);
  auto draw = [&] {
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return scale * (2.0 * unit - 1.0);
  };
  CoefficientPoint p = zero_point(n_period);
  for (double& e : p.x) e = draw();
  for (double& e : p.b) e = draw();
  p = project(p);
  p.x.pop_back();
  p.b.pop_back();
  return embed({p.x, p.b}, n_period);
}

inline double max_abs(const CoefficientPoint& p) {
  double m = 0.0;
  for (double e : p.x) m = std::max(m, std::abs(e));
  for (double e : p.b) m = std::max(m, std::abs(e));
  return m;
}

} // namespace pjm

#endif // PJM_MODEL_HPP
