#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qrmt/ensemble.hpp"
#include "qrmt/quaternion.hpp"
#include "qrmt/semicircle.hpp"

namespace qrmt {

template <typename Scalar>
using HermitianExpansion = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// 2n x 2n complex image: block (j, k) is quat_to_block(x_jk). Blocks below the diagonal are
/// formed as adjoints of those above, so the result is Hermitian bit-for-bit.
template <typename Scalar>
HermitianExpansion<Scalar> expand_hermitian(const QSelfDualMatrix<Scalar>& m) {
  const int n = m.size();
  HermitianExpansion<Scalar> h(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    h.template block<2, 2>(2 * j, 2 * j) = quat_to_block(m(j, j));
    for (int k = j + 1; k < n; ++k) {
      const ComplexBlock2<Scalar> b = quat_to_block(m(j, k));
      h.template block<2, 2>(2 * j, 2 * k) = b;
      h.template block<2, 2>(2 * k, 2 * j) = b.adjoint();
    }
  }
  return h;
}

/// Sorted eigenvalues of a 2n x 2n expansion.
struct EmpiricalSpectrum {
  Eigen::VectorXd eigenvalues;  ///< ascending, length 2n
  int n = 0;                    ///< quaternion dimension

  Eigen::Index dimension() const { return eigenvalues.size(); }
};

inline constexpr double kPairingTolerance = 1e-8;

/// Eigenvalues only, via Householder tridiagonalization and implicit-shift QR.
/// Throws ConvergenceFailure if the iteration does not converge and PairingViolation if the
/// spectrum does not come in pairs (when check_pairing is set).
EmpiricalSpectrum hermitian_eigenvalues(const HermitianExpansion<double>& h,
                                        double tol = kPairingTolerance, bool check_pairing = true);

struct PairingReport {
  double max_gap = 0.0;           ///< max lambda_{2i+1} - lambda_{2i}
  double max_relative_gap = 0.0;  ///< same, divided by max(1, |lambda_{2i+1}|)
  std::size_t worst_index = 0;
};

PairingReport even_multiplicity_check(const EmpiricalSpectrum& spectrum, double tol = kPairingTolerance);

/// Right-continuous step distribution function.
class StepCDF {
 public:
  StepCDF() = default;

  /// Equal mass at each atom (atoms need not be sorted or distinct).
  static StepCDF from_atoms(std::span<const double> atoms);
  /// Pointwise mean of several step CDFs, on the merged jump set.
  static StepCDF average(std::span<const StepCDF> cdfs);

  double cdf(double x) const;
  /// lim_{t -> x^-} F(t).
  double cdf_left(double x) const;

  const std::vector<double>& jumps() const { return jumps_; }
  /// cumulative()[i] = F(jumps()[i]); the last value is exactly 1.
  const std::vector<double>& cumulative() const { return cumulative_; }
  bool empty() const { return jumps_.empty(); }

 private:
  std::vector<double> jumps_;
  std::vector<double> cumulative_;
};

/// F^{H}: mass 1/(2n) at each of the 2n eigenvalues.
StepCDF esd(const EmpiricalSpectrum& spectrum);

/// Kolmogorov distance sup_x |F(x) - G(x)|, evaluated exactly at the jumps.
double sup_distance(const StepCDF& f, const StepCDF& g);
double sup_distance(const StepCDF& f, const SemicircleLaw& g);
inline double sup_distance(const SemicircleLaw& f, const StepCDF& g) { return sup_distance(g, f); }

inline constexpr double kLevyAccuracy = 1e-9;

/// Levy distance inf{eps : G(x - eps) - eps <= F(x) <= G(x + eps) + eps for all x},
/// by bisection on eps. The band condition is checked exactly on F's intervals of constancy.
double levy_distance(const StepCDF& f, const StepCDF& g, double accuracy = kLevyAccuracy);
double levy_distance(const StepCDF& f, const SemicircleLaw& g, double accuracy = kLevyAccuracy);

/// True when the eps-band condition of the Levy metric holds for (f, g).
bool levy_band_holds(const StepCDF& f, const StepCDF& g, double eps);
bool levy_band_holds(const StepCDF& f, const SemicircleLaw& g, double eps);

}  // namespace qrmt
