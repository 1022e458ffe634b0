#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qrmt/errors.hpp"
#include "qrmt/quaternion.hpp"

namespace qrmt {

enum class EntryLaw {
  gse,               ///< Gaussian components, variance 1/4 each off the diagonal
  bounded_discrete,  ///< components uniform on {-1/2, +1/2}; norm is exactly 1
  heavy_tail,        ///< symmetrized Pareto components, rescaled to unit second moment
  degenerate,        ///< all entries zero; accepted only when allow_degenerate is set
};

/// Law of the independent entries y_jk (j < k) and y_jj.
///
/// Off-diagonal entries have E y = 0 and E|y|^2 = 1; diagonal entries are real
/// with E y = 0 and E|y|^2 = sigma^2.
struct EntryLawSpec {
  EntryLaw kind = EntryLaw::gse;
  double sigma = 1.0;
  double tail_index = 7.0;  // heavy_tail only
  bool allow_degenerate = false;

  /// Throws InvalidSpec when the moment conditions cannot hold.
  void validate() const;

  std::string tag() const;

  /// E|y_jk|^6 for off-diagonal entries (the constant M of the sixth-moment condition).
  double offdiag_sixth_moment() const;
  /// E|y_jj|^3 for diagonal entries.
  double diag_third_moment() const;
};

EntryLaw parse_entry_law(const std::string& name);
std::string to_string(EntryLaw law);

/// n x n quaternion self-dual Hermitian matrix. Only the strict upper triangle and the
/// real diagonal are stored; x_kj = conj(x_jk) is derived on access.
template <typename Scalar>
class QSelfDualMatrix {
 public:
  using Quat = Quaternion<Scalar>;

  explicit QSelfDualMatrix(int n = 1) : n_(n) {
    if (n < 1) throw InvalidSpec("matrix dimension must be positive");
    upper_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2, Quat{});
    diag_ = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  }

  int size() const { return n_; }
  bool scaled() const { return scaled_; }
  void set_scaled(bool s) { scaled_ = s; }

  Quat operator()(int j, int k) const {
    if (j == k) return Quat::scalar(diag_(j));
    if (j < k) return upper_[packed(j, k)];
    return qconj(upper_[packed(k, j)]);
  }

  /// Sets x_jk and, implicitly, x_kj = conj(x_jk). Diagonal entries must be scalar.
  void set(int j, int k, const Quat& q) {
    if (j == k) {
      if (!q.is_scalar()) throw StructureViolation("diagonal entries must be real scalars");
      diag_(j) = q.a;
    } else if (j < k) {
      upper_[packed(j, k)] = q;
    } else {
      upper_[packed(k, j)] = qconj(q);
    }
  }

  Scalar diagonal(int j) const { return diag_(j); }
  void set_diagonal(int j, Scalar t) { diag_(j) = t; }

  template <typename F>
  void transform_entries(F&& f) {
    for (auto& q : upper_) q = f(q);
    for (int j = 0; j < n_; ++j) diag_(j) = f(Quat::scalar(diag_(j))).a;
  }

  friend bool operator==(const QSelfDualMatrix& x, const QSelfDualMatrix& y) {
    return x.n_ == y.n_ && x.scaled_ == y.scaled_ && x.upper_ == y.upper_ && x.diag_ == y.diag_;
  }

 private:
  std::size_t packed(int j, int k) const {
    // row-major strict upper triangle, j < k
    const auto jj = static_cast<std::size_t>(j);
    return jj * static_cast<std::size_t>(n_) - jj * (jj + 1) / 2 + static_cast<std::size_t>(k - j - 1);
  }

  int n_;
  bool scaled_ = false;
  std::vector<Quat> upper_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag_;
};

using QSelfDualMatrixd = QSelfDualMatrix<double>;

/// Unscaled Y_n. Entry (j, k) draws from its own counter stream keyed by (seed, j, k),
/// so the result does not depend on traversal order.
QSelfDualMatrixd sample_matrix(const EntryLawSpec& spec, int n, std::uint64_t seed);

/// S_n = Y_n / sqrt(n). Throws AlreadyScaled if y is already scaled.
QSelfDualMatrixd scaled_matrix(const QSelfDualMatrixd& y);

/// Population quantities of the truncated entry law at threshold n^{1/4}.
struct TruncatedMoments {
  double threshold = 0.0;
  double sigma_offdiag = 1.0;  ///< sqrt var(y I(|y| <= n^{1/4})), j != k
  double sigma_diag = 1.0;     ///< same for diagonal entries
  Quaterniond mean_offdiag{};  ///< E y I(|y| <= n^{1/4})
  double mean_diag = 0.0;
};

/// Computed by adaptive quadrature on the radial law; memoized per (spec, n).
TruncatedMoments truncated_moments(const EntryLawSpec& spec, int n);

struct TruncationReport {
  int count_truncated = 0;  ///< #{(j,k), j <= k : |y_jk| > n^{1/4}}
  int count_offdiag = 0;    ///< strict upper triangle only
  int count_diag = 0;
  double threshold = 0.0;
  double sigma_offdiag = 1.0;
  double sigma_diag = 1.0;
  bool below_guard = false;
};

inline constexpr double kVarianceGuard = 0.1;

/// The three matrices of the truncation argument, all unscaled:
/// tilde = y I(|y| <= n^{1/4}), hat = tilde - E tilde, w = standardized hat.
struct TruncationStages {
  QSelfDualMatrixd tilde;
  QSelfDualMatrixd hat;
  QSelfDualMatrixd w;
  TruncationReport report;
};

TruncationStages truncation_stages(const EntryLawSpec& spec, const QSelfDualMatrixd& y);

/// Unscaled W_n entries; the caller applies 1/sqrt(n). Throws DegenerateVariance when
/// sigma_jk < 0.1 (relative to sigma on the diagonal).
std::pair<QSelfDualMatrixd, TruncationReport> truncate_standardize(const EntryLawSpec& spec,
                                                                  const QSelfDualMatrixd& y);

}  // namespace qrmt
