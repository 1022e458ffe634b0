#pragma once

#include <complex>

namespace qrmt {

/// Upper-half-plane point z = u + iv.
struct ComplexPoint {
  double u = 0.0;
  double v = 1.0;

  ComplexPoint() = default;
  /// Throws InvalidParams unless v > 0.
  ComplexPoint(double u_, double v_);

  std::complex<double> z() const { return {u, v}; }
};

/// Semicircular law with density (1 / 2 pi sigma^2) sqrt(4 sigma^2 - x^2) on [-2 sigma, 2 sigma].
class SemicircleLaw {
 public:
  explicit SemicircleLaw(double sigma = 1.0);

  double sigma() const { return sigma_; }
  double edge() const { return 2.0 * sigma_; }

  double density(double x) const;
  double cdf(double x) const;
  /// CDFs here are continuous, so the left limit is the value itself.
  double cdf_left(double x) const { return cdf(x); }
  /// Inverse CDF on [0, 1].
  double quantile(double p) const;
  /// Antiderivative of the CDF: integral of cdf over (-inf, x].
  double cdf_antiderivative(double x) const;
  /// Stieltjes transform at z (Im z > 0), s_sigma(z) = s(z / sigma) / sigma.
  std::complex<double> stieltjes(std::complex<double> z) const;

 private:
  double sigma_;
};

inline double semicircle_density(const SemicircleLaw& law, double x) { return law.density(x); }
inline double semicircle_cdf(const SemicircleLaw& law, double x) { return law.cdf(x); }

/// s(z) = -(z - sqrt(z^2 - 4)) / 2 with the branch that keeps Im s > 0 on Im z > 0 and
/// s(z) -> 0 at infinity. sqrt(z^2 - 4) is evaluated as sqrt(z - 2) sqrt(z + 2), which is
/// analytic off [-2, 2] and behaves like z at infinity.
std::complex<double> semicircle_stieltjes(std::complex<double> z);
inline std::complex<double> semicircle_stieltjes(const ComplexPoint& z) {
  return semicircle_stieltjes(z.z());
}

}  // namespace qrmt
