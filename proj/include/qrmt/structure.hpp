#pragma once

#include <algorithm>
#include <complex>

#include <Eigen/Core>

#include "qrmt/errors.hpp"

namespace qrmt {

// Both patterns tile an even-dimensional matrix into 2x2 blocks M_jk with scalar diagonal
// blocks t_j I2.
//
// Type-I:  off-diagonal M_kj = adj(M_jk), i.e. [[a, b], [c, d]] pairs with [[d, -b], [-c, a]].
// Type-II: additionally each M_jk (j < k) has quaternion form [[alpha, beta], [-conj(beta), conj(alpha)]],
//          so the dual block M_kj = [[conj(alpha), -beta], [conj(beta), alpha]].
//
// Residuals are absolute; the classifiers compare them against tol * max(1, max|m_ij|).

namespace detail {

template <typename Derived>
void require_even_square(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw OddDimension("structural classifiers need a square matrix");
  if (m.rows() % 2 != 0) throw OddDimension("structural classifiers need an even dimension");
}

template <typename Derived>
double scalar_diagonal_residual(const Eigen::MatrixBase<Derived>& m) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < m.rows(); j += 2) {
    r = std::max({r, std::abs(m(j, j) - m(j + 1, j + 1)), std::abs(m(j, j + 1)), std::abs(m(j + 1, j))});
  }
  return r;
}

template <typename Derived>
double scale_of(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 1.0 : std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
}

}  // namespace detail

/// Largest deviation of m from the Type-I pattern.
template <typename Derived>
double type1_residual(const Eigen::MatrixBase<Derived>& m) {
  detail::require_even_square(m);
  double r = detail::scalar_diagonal_residual(m);
  const Eigen::Index n = m.rows() / 2;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const auto a = m(2 * j, 2 * k), b = m(2 * j, 2 * k + 1);
      const auto c = m(2 * j + 1, 2 * k), d = m(2 * j + 1, 2 * k + 1);
      r = std::max({r, std::abs(m(2 * k, 2 * j) - d), std::abs(m(2 * k, 2 * j + 1) + b),
                    std::abs(m(2 * k + 1, 2 * j) + c), std::abs(m(2 * k + 1, 2 * j + 1) - a)});
    }
  }
  return r;
}

/// Largest deviation of m from the Type-II pattern.
template <typename Derived>
double type2_residual(const Eigen::MatrixBase<Derived>& m) {
  detail::require_even_square(m);
  double r = detail::scalar_diagonal_residual(m);
  const Eigen::Index n = m.rows() / 2;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const auto alpha = m(2 * j, 2 * k), beta = m(2 * j, 2 * k + 1);
      r = std::max({r, std::abs(m(2 * j + 1, 2 * k) + std::conj(beta)),
                    std::abs(m(2 * j + 1, 2 * k + 1) - std::conj(alpha)),
                    std::abs(m(2 * k, 2 * j) - std::conj(alpha)), std::abs(m(2 * k, 2 * j + 1) + beta),
                    std::abs(m(2 * k + 1, 2 * j) - std::conj(beta)), std::abs(m(2 * k + 1, 2 * j + 1) - alpha)});
    }
  }
  return r;
}

template <typename Derived>
bool is_type1(const Eigen::MatrixBase<Derived>& m, double tol) {
  return type1_residual(m) <= tol * detail::scale_of(m);
}

template <typename Derived>
bool is_type2(const Eigen::MatrixBase<Derived>& m, double tol) {
  return type2_residual(m) <= tol * detail::scale_of(m);
}

}  // namespace qrmt
