#ifndef PJM_JACOBIAN_HPP
#define PJM_JACOBIAN_HPP

// Analytic derivative of the height map in the chart (u, v).
//
//   d mu_n      = -d theta_{N+1}(mu_n) / theta'_{N+1}(mu_n)
//   d lambda_n  = -d Delta'(lambda_n) / Delta''(lambda_n)
//   d xi_n      = (-1)^{s_n} d Delta(lambda_n) / (sinh sqrt(xi_n) / sqrt(xi_n))
//   d h_{1n}    = [theta'_N(mu_n) d mu_n + d theta_N(mu_n)] / theta_N(mu_n)
//
// Rows of h_{2n} use (d xi_n - 2 h_{1n} d h_{1n}) / (2 h_{2n}) while h_{2n} is
// clear of zero and beta_n (d lambda_n - d mu_n) next to it.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "pjm/heights.hpp"
#include "pjm/linalg.hpp"
#include "pjm/spectrum.hpp"
#include "pjm/transfer.hpp"

namespace pjm {

enum class H2Branch { division, curvature };

struct HeightJacobian {
  /// Rows (h_11..h_1,N-1, h_21..h_2,N-1); columns (u_1..u_{N-1}, v_1..v_{N-1}).
  Matrix matrix;
  std::vector<H2Branch> branch;
  /// Relative gap between the two h_{2n} row formulas where both were
  /// evaluated (overlap zone), NaN elsewhere.
  Vector branch_disagreement;
  std::vector<std::string> warnings;
};

struct JacobianOptions {
  HeightOptions heights;
  /// Both h_{2n} formulas are compared when 0 < |h_{2n}| <= overlap_factor * switch.
  double overlap_factor = 100.0;
  double disagreement_warning = 1e-4;
};

namespace detail {

inline Vector scaled(const Vector& v, double s) {
  Vector out(v);
  for (double& e : out) e *= s;
  return out;
}

inline double relative_difference(const Vector& a, const Vector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::max(std::abs(a[i]), std::abs(b[i])));
  }
  return den > 0.0 ? num / den : 0.0;
}

inline Vector grad_mu(const Recurrence& rec, const SpectralData& sd, std::size_t gap) {
  const double mu = sd.dirichlet.at(gap - 1);
  const SolutionFrame fr = rec.frame(mu, 1);
  const double slope = fr.theta_n1[1];
  const double scale = std::pow(sd.bound, static_cast<double>(rec.period()) - 2.0);
  if (!(std::abs(slope) > 1e-12 * scale)) {
    throw NumericalError("theta_{N+1} has a degenerate zero at mu_" + std::to_string(gap));
  }
  return scaled(reduce_gradient(rec.gradients(mu).theta_n1), -1.0 / slope);
}

inline Vector grad_lambda_crit(const Recurrence& rec, const SpectralData& sd, std::size_t gap) {
  const double lambda = sd.critical.at(gap - 1);
  const SolutionFrame fr = rec.frame(lambda, 2);
  const double curvature = *fr.delta_d2;
  if (curvature == 0.0) {
    throw NumericalError("Delta'' vanishes at critical point " + std::to_string(gap));
  }
  return scaled(reduce_gradient(rec.gradients(lambda).delta_d1), -1.0 / curvature);
}

inline HeightJacobian grad_heights(const Recurrence& rec, const SpectralData& sd,
                                   const HeightVector& h, const JacobianOptions& opts) {
  const std::size_t gaps = sd.gaps();
  const std::size_t dim = 2 * gaps;
  HeightJacobian jac;
  jac.matrix = Matrix(dim, dim);
  jac.branch.assign(gaps, H2Branch::curvature);
  jac.branch_disagreement.assign(gaps, std::numeric_limits<double>::quiet_NaN());

  for (std::size_t gap = 1; gap <= gaps; ++gap) {
    const std::size_t i = gap - 1;
    const double sign = sd.gap_sign(gap);
    const double lambda = sd.critical[i];
    const double mu = sd.dirichlet[i];

    const SolutionFrame at_mu = rec.frame(mu, 1);
    const TransferGradients g_mu = rec.gradients(mu);
    const double theta_n = at_mu.theta_n[0];
    if (theta_n == 0.0) {
      throw NumericalError("theta_N(mu_n) = 0 at gap " + std::to_string(gap));
    }
    const double slope = at_mu.theta_n1[1];
    if (slope == 0.0) {
      throw NumericalError("theta_{N+1} has a degenerate zero at mu_" + std::to_string(gap));
    }
    const Vector d_mu = scaled(reduce_gradient(g_mu.theta_n1), -1.0 / slope);
    const Vector d_theta = reduce_gradient(g_mu.theta_n);
    Vector d_h1(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      d_h1[j] = (at_mu.theta_n[1] * d_mu[j] + d_theta[j]) / theta_n;
    }

    auto curvature_row = [&] {
      const SolutionFrame at_lambda = rec.frame(lambda, 2);
      const Vector d_lambda =
          scaled(reduce_gradient(rec.gradients(lambda).delta_d1), -1.0 / *at_lambda.delta_d2);
      const double beta = gap_curvature(rec, sign, lambda, mu, h.xi[i], h.xi1[i]).beta;
      Vector row(dim);
      for (std::size_t j = 0; j < dim; ++j) row[j] = beta * (d_lambda[j] - d_mu[j]);
      return row;
    };
    auto division_row = [&] {
      const Vector d_delta = reduce_gradient(rec.gradients(lambda).delta);
      const double root = std::sqrt(h.xi[i]);
      // 2 d cosh(sqrt xi)/d xi = sinh(sqrt xi)/sqrt xi, -> 1 at xi = 0.
      const double dcosh2 = root > 0.0 ? std::sinh(root) / root : 1.0;
      Vector row(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        const double d_xi = sign * d_delta[j] / dcosh2;
        row[j] = (d_xi - 2.0 * h.h1[i] * d_h1[j]) / (2.0 * h.h2[i]);
      }
      return row;
    };

    const double h2 = h.h2[i];
    const double tau = switch_threshold(h.habs[i], opts.heights);
    Vector d_h2;
    if (std::abs(h2) > tau) {
      jac.branch[i] = H2Branch::division;
      d_h2 = division_row();
    } else {
      d_h2 = curvature_row();
    }
    if (h2 != 0.0 && std::abs(h2) <= opts.overlap_factor * tau) {
      const Vector other = std::abs(h2) > tau ? curvature_row() : division_row();
      const double gap_rel = relative_difference(d_h2, other);
      jac.branch_disagreement[i] = gap_rel;
      if (gap_rel > opts.disagreement_warning) {
        jac.warnings.push_back("gap " + std::to_string(gap) +
                               ": h2 row formulas disagree by " + std::to_string(gap_rel));
      }
    }

    for (std::size_t j = 0; j < dim; ++j) {
      jac.matrix(i, j) = d_h1[j];
      jac.matrix(gaps + i, j) = d_h2[j];
    }
  }
  return jac;
}

} // namespace detail

/// Gradient of mu_n (gap n = 1..N-1) in the chart.
inline Vector grad_mu(const CoefficientPoint& p, const SpectralData& sd, std::size_t gap) {
  require_valid(p);
  return detail::grad_mu(detail::Recurrence(p), sd, gap);
}

inline Vector grad_mu(const CoefficientPoint& p, std::size_t gap) {
  return grad_mu(p, spectral_data(p), gap);
}

/// Gradient of the critical point lambda_n in the chart.
inline Vector grad_lambda_crit(const CoefficientPoint& p, const SpectralData& sd, std::size_t gap) {
  require_valid(p);
  return detail::grad_lambda_crit(detail::Recurrence(p), sd, gap);
}

inline Vector grad_lambda_crit(const CoefficientPoint& p, std::size_t gap) {
  return grad_lambda_crit(p, spectral_data(p), gap);
}

inline HeightJacobian grad_heights(const CoefficientPoint& p, const SpectralData& sd,
                                   const HeightVector& h, const JacobianOptions& opts = {}) {
  require_valid(p);
  return detail::grad_heights(detail::Recurrence(p), sd, h, opts);
}

inline HeightJacobian grad_heights(const CoefficientPoint& p, const JacobianOptions& opts = {}) {
  const SpectralData sd = spectral_data(p, opts.heights.spectrum);
  const HeightVector h = height_map(p, sd, opts.heights);
  return grad_heights(p, sd, h, opts);
}

/// Central differences of height_map in the chart.  Diagnostic path for
/// solver debugging.
inline Matrix fd_jacobian(const CoefficientPoint& p, double step = 1e-6,
                          const HeightOptions& opts = {}) {
  const Vector base = reduce(p).flat();
  const std::size_t dim = base.size();
  Matrix jac(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    Vector plus(base), minus(base);
    plus[j] += step;
    minus[j] -= step;
    const Vector hp = height_map(embed(ReducedPoint::from_flat(plus), p.n), opts).flat();
    const Vector hm = height_map(embed(ReducedPoint::from_flat(minus), p.n), opts).flat();
    for (std::size_t i = 0; i < dim; ++i) jac(i, j) = (hp[i] - hm[i]) / (2.0 * step);
  }
  return jac;
}

/// Row-major CSV, 17 significant digits.
inline void write_csv(std::ostream& out, const Matrix& m) {
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  out.precision(precision);
}

} // namespace pjm

#endif // PJM_JACOBIAN_HPP
