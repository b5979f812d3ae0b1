#ifndef PJM_QUASIMOMENTUM_HPP
#define PJM_QUASIMOMENTUM_HPP

// Boundary values of the quasimomentum k(lambda), 2 cos k = (-1)^N Delta.
// Band sigma_n maps onto [(n-1) pi, n pi]; the two banks of gap n map onto
// the vertical slit Re k = pi n, |Im k| <= |h_n|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "pjm/heights.hpp"
#include "pjm/spectrum.hpp"
#include "pjm/transfer.hpp"

namespace pjm {

struct SlitDomainData {
  Vector slit_centers;    // pi n
  Vector slit_heights;    // |h_n|
  Vector dirichlet_marks; // h_{1n}
};

inline SlitDomainData slit_domain(const HeightVector& h) {
  SlitDomainData d;
  for (std::size_t k = 0; k < h.gaps(); ++k) {
    d.slit_centers.push_back(std::numbers::pi * static_cast<double>(k + 1));
    d.slit_heights.push_back(h.habs[k]);
    d.dirichlet_marks.push_back(h.h1[k]);
  }
  return d;
}

enum class Side { upper, lower };

inline constexpr double kEdgeTolerance = 1e-12; // relative to B

namespace detail {

/// arccos(w) with w = sign Delta / 2, from Delta -+ 2 sign so that both ends
/// of the band keep full accuracy. Measured against the values of Delta at the
/// stored band ends so that k lands exactly on (n-1) pi and n pi there.
inline double band_angle(const Recurrence& rec, double sign, double lambda, double begin,
                         double end) {
  const double top = -sign * (rec.delta_minus(lambda, 2.0 * sign) - rec.delta_minus(begin, 2.0 * sign));
  const double bottom = sign * (rec.delta_minus(lambda, -2.0 * sign) - rec.delta_minus(end, -2.0 * sign));
  const double to_top = top / 4.0;       // (1 - w) / 2
  const double to_bottom = bottom / 4.0; // (1 + w) / 2
  if (to_top <= to_bottom) return 2.0 * std::asin(std::sqrt(std::clamp(to_top, 0.0, 1.0)));
  return std::numbers::pi - 2.0 * std::asin(std::sqrt(std::clamp(to_bottom, 0.0, 1.0)));
}

/// 1-based band containing lambda, or 0 when lambda sits in an open gap.
inline std::size_t locate_band(const SpectralData& sd, double lambda) {
  const double tol = kEdgeTolerance * sd.bound;
  if (lambda < sd.edges.front() - tol || lambda > sd.edges.back() + tol) {
    throw DomainError("lambda = " + std::to_string(lambda) + " lies outside the spectrum");
  }
  // First band whose right end is not left of lambda.
  std::size_t lo = 1, hi = sd.n;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (sd.band_end(mid) + tol < lambda) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lambda >= sd.band_begin(lo) - tol ? lo : 0;
}

} // namespace detail

/// k on the closed band containing lambda; real and in [0, N pi].
inline double k_on_band(const CoefficientPoint& p, const SpectralData& sd, double lambda) {
  require_valid(p);
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  const std::size_t band = detail::locate_band(sd, lambda);
  if (band == 0) throw DomainError("lambda = " + std::to_string(lambda) + " lies in an open gap");
  const double sign = alternating(sd.n - band + 1);
  return std::numbers::pi * static_cast<double>(band - 1) +
         detail::band_angle(detail::Recurrence(p), sign, lambda, sd.band_begin(band),
                             sd.band_end(band));
}

/// k(lambda +- i0) on the banks of open gap n.
inline std::complex<double> k_on_gap(const CoefficientPoint& p, const SpectralData& sd,
                                     std::size_t gap, double lambda, Side side) {
  require_valid(p);
  if (gap < 1 || gap > sd.gaps()) throw DomainError("gap index out of range");
  if (sd.gap_closed[gap - 1]) throw DomainError("gap " + std::to_string(gap) + " is closed");
  const double tol = kEdgeTolerance * sd.bound;
  if (!(lambda >= sd.lower(gap) - tol && lambda <= sd.upper(gap) + tol)) {
    throw DomainError("lambda = " + std::to_string(lambda) + " lies outside gap " +
                      std::to_string(gap));
  }
  const double sign = sd.gap_sign(gap);
  const double excess = sign * detail::Recurrence(p).delta_minus(lambda, 2.0 * sign);
  const double im = acosh_one_plus(std::max(excess, 0.0));
  return {std::numbers::pi * static_cast<double>(gap), side == Side::upper ? im : -im};
}

} // namespace pjm

#endif // PJM_QUASIMOMENTUM_HPP
