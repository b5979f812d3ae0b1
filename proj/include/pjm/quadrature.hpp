#ifndef PJM_QUADRATURE_HPP
#define PJM_QUADRATURE_HPP

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace pjm::detail {

/// Gauss-Legendre nodes and weights on [0, 1]; exact for polynomials of
/// degree <= 2 order - 1.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(std::size_t order) {
  std::vector<double> nodes(order), weights(order);
  const double m = static_cast<double>(order);
  for (std::size_t i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      // P_order(x) and its derivative by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

} // namespace pjm::detail

#endif // PJM_QUADRATURE_HPP
