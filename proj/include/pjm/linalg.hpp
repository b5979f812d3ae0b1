#ifndef PJM_LINALG_HPP
#define PJM_LINALG_HPP

// Small dense matrices and LU with partial pivoting.  Orders here are 2N-2,
// a few dozen at most.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "pjm/errors.hpp"

namespace pjm {

class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const noexcept { return data_; }

  std::vector<double> operator*(const std::vector<double>& v) const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    }
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (double e : data_) m = std::max(m, std::abs(e));
    return m;
  }

  /// Maximum absolute column sum.
  double norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Raised when a pivot underflows; `row` is the original row index of the
/// smallest pivot.
class SingularMatrixError : public NumericalError {
public:
  SingularMatrixError(std::size_t row, double pivot)
      : NumericalError("singular matrix: pivot " + std::to_string(pivot) + " in row " +
                       std::to_string(row)),
        row_(row), pivot_(pivot) {}
  std::size_t row() const noexcept { return row_; }
  double pivot() const noexcept { return pivot_; }

private:
  std::size_t row_;
  double pivot_;
};

class LuDecomposition {
public:
  explicit LuDecomposition(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw DomainError("LU: matrix must be square");
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double scale = std::max(lu_.max_abs(), std::numeric_limits<double>::min());
    double smallest = std::numeric_limits<double>::infinity();
    std::size_t smallest_row = 0;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
      }
      const double pivot = lu_(k, k);
      if (std::abs(pivot) < smallest) {
        smallest = std::abs(pivot);
        smallest_row = perm_[k];
      }
      if (!(std::abs(pivot) > std::numeric_limits<double>::epsilon() * 1e-4 * scale)) {
        throw SingularMatrixError(smallest_row, pivot);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double factor = lu_(i, k) / pivot;
        lu_(i, k) = factor;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
      }
    }
    smallest_pivot_row_ = smallest_row;
  }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    const std::size_t n = lu_.rows();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
    return x;
  }

  Matrix inverse() const {
    const std::size_t n = lu_.rows();
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = 1.0;
      const auto col = solve(e);
      for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
      e[j] = 0.0;
    }
    return inv;
  }

  std::size_t smallest_pivot_row() const noexcept { return smallest_pivot_row_; }

private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  std::size_t smallest_pivot_row_ = 0;
};

/// kappa_1(A) = ||A||_1 ||A^{-1}||_1, infinite when A is singular.
inline double condition_number(const Matrix& a) {
  try {
    const LuDecomposition lu(a);
    return a.norm1() * lu.inverse().norm1();
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
}

} // namespace pjm

#endif // PJM_LINALG_HPP
