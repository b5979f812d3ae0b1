#ifndef PJM_HEIGHTS_HPP
#define PJM_HEIGHTS_HPP

// The height mapping h(p) = (h_{1n}, h_{2n})_{n=1..N-1}:
//
//   h_{1n}       = log[(-1)^{s_n} theta_N(mu_n)]
//   2 cosh|h_n|  = (-1)^{s_n} Delta(lambda_n)
//   h_{2n}       = sign(lambda_n - mu_n) sqrt(|h_n|^2 - h_{1n}^2)
//               = beta_n (lambda_n - mu_n)
//
// with beta_n = sqrt(g_n / (2 f_n)) > 0 built from the Taylor remainder of
// Delta at lambda_n and the divided difference of cosh(sqrt(.)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pjm/model.hpp"
#include "pjm/quadrature.hpp"
#include "pjm/spectrum.hpp"
#include "pjm/transfer.hpp"

namespace pjm {

struct HeightVector {
  Vector h1;
  Vector h2;
  Vector habs; // |h_n|
  Vector xi;   // |h_n|^2
  Vector xi1;  // h_{1n}^2

  std::size_t gaps() const noexcept { return h1.size(); }

  /// Builds the derived fields from (h1, h2).
  static HeightVector from_components(Vector h1, Vector h2) {
    if (h1.size() != h2.size()) throw DomainError("height vector: h1 and h2 differ in length");
    HeightVector h;
    h.h1 = std::move(h1);
    h.h2 = std::move(h2);
    for (std::size_t k = 0; k < h.h1.size(); ++k) {
      if (!std::isfinite(h.h1[k]) || !std::isfinite(h.h2[k])) {
        throw DomainError("height vector: entries must be finite");
      }
      h.xi1.push_back(h.h1[k] * h.h1[k]);
      h.xi.push_back(h.xi1.back() + h.h2[k] * h.h2[k]);
      h.habs.push_back(std::hypot(h.h1[k], h.h2[k]));
    }
    return h;
  }

  /// (h_11, ..., h_1,N-1, h_21, ..., h_2,N-1)
  Vector flat() const {
    Vector out(h1);
    out.insert(out.end(), h2.begin(), h2.end());
    return out;
  }

  static HeightVector from_flat(const Vector& w) {
    const auto half = static_cast<std::ptrdiff_t>(w.size() / 2);
    return from_components(Vector(w.begin(), w.begin() + half), Vector(w.begin() + half, w.end()));
  }

  /// h_+ = max_n |h_n|
  double max_height() const {
    double m = 0.0;
    for (double e : habs) m = std::max(m, e);
    return m;
  }
};

struct HeightOptions {
  SpectrumOptions spectrum;
  /// Below switch_factor (1 + |h_n|), h_{2n} comes from beta_n (lambda_n - mu_n).
  double switch_factor = 1e-6;
  /// |lambda_n - mu_n| <= sign_dead_band B gives h_{2n} = 0.
  double sign_dead_band = 1e-12;
  /// Allowed excess of |h_{1n}| over |h_n|, relative to 1 + |h_n|.
  double consistency_tol = 1e-8;
};

inline double switch_threshold(double habs, const HeightOptions& opts = {}) {
  return opts.switch_factor * (1.0 + habs);
}

/// acosh(1 + excess / 2), accurate for tiny excess.
inline double acosh_one_plus(double excess) {
  if (excess <= 0.0) return 0.0;
  const double z = 0.5 * excess;
  return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

/// f(x, y) = 2 sum_{k>=1} (x^k - y^k) / ((x - y) (2k)!), i.e. the divided
/// difference of 2 cosh(sqrt(.)).  The divided difference of powers is
/// accumulated as sum_{j<k} x^j y^{k-1-j}, which stays exact at x = y.
inline double cosh_divided_difference(double x, double y) {
  double powers = 1.0; // sum_{j<k} x^j y^{k-1-j} for k = 1
  double y_pow = 1.0;  // y^{k-1}
  double factorial = 2.0;
  double sum = 0.0;
  for (int k = 1; k < 400; ++k) {
    const double term = 2.0 * powers / factorial;
    sum += term;
    if (k > 1 && std::abs(term) <= 1e-16 * std::abs(sum)) break;
    y_pow *= y;
    powers = x * powers + y_pow;
    factorial *= static_cast<double>((2 * k + 1) * (2 * k + 2));
    if (!std::isfinite(factorial)) break;
  }
  return sum;
}

namespace detail {

/// theta_N at the zero mu of theta_{N+1}, through the Newton-corrected form
/// theta_N - theta_{N+1} theta_N' / theta_{N+1}', which is stationary in mu.
/// h_{1n} is badly conditioned in mu alone when theta_N is small.
inline double theta_at_dirichlet(const Recurrence& rec, double mu) {
  const SolutionFrame fr = rec.frame(mu, 1);
  if (fr.theta_n1[1] == 0.0) return fr.theta_n[0];
  return fr.theta_n[0] - fr.theta_n1[0] * fr.theta_n[1] / fr.theta_n1[1];
}

struct GapCurvature {
  double g = 0.0;    // (-1)^{s_n+1} [Delta''(l) + tau int_0^1 (1-t)^2 Delta'''(l + t tau) dt]
  double f = 0.0;    // cosh_divided_difference(xi, xi1)
  double beta = 0.0; // sqrt(g / (2 f))
};

inline GapCurvature gap_curvature(const Recurrence& rec, double sign, double lambda, double mu,
                                  double xi, double xi1) {
  const std::size_t n = rec.period();
  const double tau = mu - lambda;
  const Vector c = rec.delta_taylor(lambda, 3);
  double remainder = 0.0;
  if (n >= 3 && tau != 0.0) {
    // Integrand is a polynomial of degree N-1 in t.
    const auto [nodes, weights] = gauss_legendre_unit(n / 2 + n % 2 + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Vector ct = rec.delta_taylor(lambda + nodes[i] * tau, 3);
      const double one_minus = 1.0 - nodes[i];
      remainder += weights[i] * one_minus * one_minus * 6.0 * ct[3];
    }
  }
  GapCurvature out;
  out.g = -sign * (2.0 * c[2] + tau * remainder);
  out.f = cosh_divided_difference(xi, xi1);
  if (!(out.g > 0.0)) {
    throw NumericalError("curvature g_n at a critical point is not positive");
  }
  out.beta = std::sqrt(out.g / (2.0 * out.f));
  return out;
}

inline HeightVector height_map(const Recurrence& rec, const SpectralData& sd,
                               const HeightOptions& opts) {
  const std::size_t gaps = sd.gaps();
  HeightVector h;
  h.h1.assign(gaps, 0.0);
  h.h2.assign(gaps, 0.0);
  h.habs.assign(gaps, 0.0);
  h.xi.assign(gaps, 0.0);
  h.xi1.assign(gaps, 0.0);
  for (std::size_t gap = 1; gap <= gaps; ++gap) {
    const std::size_t i = gap - 1;
    if (sd.gap_closed[i]) continue;
    const double sign = sd.gap_sign(gap);
    const double lambda = sd.critical[i];
    const double mu = sd.dirichlet[i];

    const double norming = sign * theta_at_dirichlet(rec, mu);
    if (!(norming > 0.0)) {
      throw NumericalError("(-1)^{s_n} theta_N(mu_n) <= 0 at gap " + std::to_string(gap) +
                           ": inconsistent spectral data");
    }
    const double h1 = std::log(norming);
    const double habs = acosh_one_plus(sd.crest_excess[i]);
    if (std::abs(h1) > habs + opts.consistency_tol * (1.0 + habs)) {
      throw NumericalError("|h_1n| exceeds |h_n| at gap " + std::to_string(gap) +
                           ": inconsistent lambda_n / mu_n");
    }
    double h2 = 0.0;
    const double split = lambda - mu;
    if (std::abs(split) > opts.sign_dead_band * sd.bound) {
      const double a1 = std::abs(h1);
      const double naive = std::sqrt(std::abs((habs - a1) * (habs + a1)));
      if (naive >= switch_threshold(habs, opts)) {
        h2 = split > 0.0 ? naive : -naive;
      } else {
        h2 = gap_curvature(rec, sign, lambda, mu, habs * habs, h1 * h1).beta * split;
      }
    }
    h.h1[i] = h1;
    h.h2[i] = h2;
    h.habs[i] = habs;
    h.xi[i] = habs * habs;
    h.xi1[i] = h1 * h1;
  }
  return h;
}

} // namespace detail

inline HeightVector height_map(const CoefficientPoint& p, const SpectralData& sd,
                               const HeightOptions& opts = {}) {
  require_valid(p);
  return detail::height_map(detail::Recurrence(p), sd, opts);
}

inline HeightVector height_map(const CoefficientPoint& p, const HeightOptions& opts = {}) {
  return height_map(p, spectral_data(p, opts.spectrum), opts);
}

/// sum_k (b_k^2 + 2 a_k^2)
inline double trace_energy(const CoefficientPoint& p) {
  double total = 0.0;
  for (std::size_t k = 0; k < p.n; ++k) total += p.b[k] * p.b[k] + 2.0 * std::exp(2.0 * p.x[k]);
  return total;
}

struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;

  /// (rhs - lhs) / max(|lhs|, |rhs|); non-negative when lhs <= rhs holds.
  double slack() const {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
    return (rhs - lhs) / scale;
  }
  bool holds(double tol = 1e-10) const { return slack() >= -tol; }
  bool strict() const { return rhs > lhs; }
};

struct EstimateReport {
  double c = 0.0;      // (lambda_N^- - lambda_0^+) / 2
  double c0 = 0.0;     // (lambda_N^- + lambda_0^+) / 2
  double energy = 0.0; // H = sum (b_n^2 + 2 a_n^2)
  double h_plus = 0.0; // max |h_n|
  std::vector<Inequality> inequalities;

  bool all_hold(double tol = 1e-10) const {
    return std::all_of(inequalities.begin(), inequalities.end(),
                       [tol](const Inequality& q) { return q.holds(tol); });
  }
  bool all_strict() const {
    return std::all_of(inequalities.begin(), inequalities.end(),
                       [](const Inequality& q) { return q.strict(); });
  }
  std::vector<std::string> violations(double tol = 1e-10) const {
    std::vector<std::string> out;
    for (const auto& q : inequalities) {
      if (!q.holds(tol)) out.push_back(q.name);
    }
    return out;
  }
};

/// The two-sided estimates tying the spectral width c, the energy H and the
/// largest slit height h_+ together.
inline EstimateReport estimate_report(const CoefficientPoint& p, const SpectralData& sd,
                                      const HeightVector& h) {
  require_valid(p);
  EstimateReport r;
  r.c = 0.5 * (sd.edges.back() - sd.edges.front());
  r.c0 = 0.5 * (sd.edges.back() + sd.edges.front());
  r.energy = trace_energy(p);
  r.h_plus = h.max_height();
  const double n = static_cast<double>(p.n);
  const double c2 = r.c * r.c;
  const double e_h = std::exp(r.h_plus);
  const double e_2h = e_h * e_h;
  r.inequalities = {
      {"e^{2h+}/4 <= c^2", 0.25 * e_2h, c2},
      {"c^2 <= H", c2, r.energy},
      {"H <= 4Nc^2", r.energy, 4.0 * n * c2},
      {"4Nc^2 <= 32Ne^{2h+}", 4.0 * n * c2, 32.0 * n * e_2h},
      {"1 <= c/2", 1.0, 0.5 * r.c},
      {"c/2 <= e^{h+}", 0.5 * r.c, e_h},
      {"e^{h+} <= 2c", e_h, 2.0 * r.c},
      {"|c0| <= c", std::abs(r.c0), r.c},
  };
  return r;
}

inline EstimateReport estimate_report(const CoefficientPoint& p, const HeightVector& h) {
  return estimate_report(p, spectral_data(p), h);
}

} // namespace pjm

#endif // PJM_HEIGHTS_HPP
