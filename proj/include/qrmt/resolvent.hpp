#pragma once

#include <complex>

#include <Eigen/Core>

#include "qrmt/quaternion.hpp"
#include "qrmt/semicircle.hpp"
#include "qrmt/structure.hpp"

namespace qrmt {

/// D = (W - zI)^{-1} for a 2n x 2n expansion W.
struct Resolvent {
  Eigen::MatrixXcd D;
  ComplexPoint z;
  double residual = 0.0;  ///< max |(W - zI) D - I|
};

Resolvent resolvent(const Eigen::MatrixXcd& w, const ComplexPoint& z);

/// Quantities attached to the k-th quaternion row/column of W (k is zero-based).
struct MinorContext {
  int k = 0;
  ComplexPoint z;
  /// k-th quaternion column of W with its k-th block removed, (2n-2) x 2. Taken from the
  /// expansion itself, so it already carries the 1/sqrt(n) of W_n = n^{-1/2}(x_jk).
  Eigen::MatrixXcd q;
  Eigen::MatrixXcd D_k;  ///< (W(k) - zI)^{-1}
  Eigen::MatrixXcd P_k;  ///< D_k^2
  std::complex<double> trace_D;
  std::complex<double> trace_D_k;
};

/// Throws IndexOutOfRange unless 0 <= k < n.
MinorContext minor_resolvent(const Eigen::MatrixXcd& w, int k, const ComplexPoint& z);

/// Removes the k-th quaternion row and column.
Eigen::MatrixXcd quaternion_minor(const Eigen::MatrixXcd& w, int k);

struct EpsilonK {
  Eigen::Matrix2cd value;   ///< eps_k
  Eigen::Matrix2cd xi;      ///< ((z + E s_n) I - eps_k)^{-1}
  std::complex<double> t_n; ///< 1 / (z + E s_n)
  double scalar_deviation = 0.0;  ///< max(|off-diagonal|, |d11 - d22|)
};

/// eps_k = n^{-1/2} x_kk - n^{-1} Q_k^* D_k Q_k + E s_n I, with x_kk the unscaled diagonal entry
/// of W_n. Esn may be a single-instance s_n(z) or a Monte Carlo average.
EpsilonK epsilon_k(const MinorContext& ctx, const Quaterniond& x_kk, std::complex<double> Esn, int n);

/// tr(t_n eps_k ((z + E s_n) I - eps_k)^{-1}), one summand of the delta_n average.
std::complex<double> delta_summand(const EpsilonK& eps);

/// (2n)^{-1} sum_k t_n tr(eps_k xi_k) using one minor resolvent per k.
std::complex<double> delta_from_minors(const Eigen::MatrixXcd& w, const ComplexPoint& z,
                                       std::complex<double> Esn);

/// Same average read off the full resolvent: the k-th diagonal 2x2 block of D equals -xi_k,
/// so eps_k = (z + E s_n) I + D_kk^{-1}.
std::complex<double> delta_from_resolvent(const Eigen::MatrixXcd& w, const ComplexPoint& z,
                                          std::complex<double> Esn);

/// Im(-z - n^{-1} varpi_k^* D_k varpi_k) + v, which is negative for a Hermitian W.
double imaginary_part_margin(const MinorContext& ctx);

struct InverseStructureReport {
  Eigen::MatrixXcd inverse;
  double structural_residual = 0.0;  ///< type1_residual(m^{-1})
  double condition_estimate = 0.0;   ///< 1 / rcond of the LU factorization
  bool is_type1 = false;
};

inline constexpr double kSingularCondition = 1e12;

/// Inverts a Type-II matrix by partial-pivot LU and classifies the inverse.
/// Throws StructureViolation if m is not Type-II within tol and NumericallySingular when the
/// condition estimate exceeds 1e12.
InverseStructureReport verify_inverse_type1(const Eigen::MatrixXcd& m, double tol);

struct BlockInverse {
  Eigen::MatrixXcd top_left, top_right, bottom_left, bottom_right;

  Eigen::MatrixXcd assemble() const;
};

/// Partitioned inverse through the Schur complement S = M22 - M21 M11^{-1} M12:
///   [ M11^{-1} + M11^{-1} M12 S^{-1} M21 M11^{-1},  -M11^{-1} M12 S^{-1} ]
///   [ -S^{-1} M21 M11^{-1},                          S^{-1}             ]
/// Throws SingularBlock when M11 or S is numerically singular.
BlockInverse block_inverse(const Eigen::MatrixXcd& m, Eigen::Index split);

}  // namespace qrmt
