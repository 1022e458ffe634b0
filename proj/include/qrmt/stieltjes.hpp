#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qrmt/semicircle.hpp"
#include "qrmt/spectra.hpp"

namespace qrmt {

/// (2n)^{-1} sum_i 1 / (lambda_i - z).
std::complex<double> empirical_stieltjes(const EmpiricalSpectrum& spectrum, const ComplexPoint& z);

/// Empirical transform at u + iv for every u in the grid.
std::vector<std::complex<double>> empirical_stieltjes_on_grid(const EmpiricalSpectrum& spectrum,
                                                              std::span<const double> u_grid, double v);

/// Parameters of the Stieltjes smoothing inequality for the Kolmogorov distance.
struct BaiBoundParams {
  double A = 20.0;
  double B = 3.0;
  double a = 2.0;
  double v = 0.1;

  /// gamma = (1/pi) int_{|u| < a} du / (1 + u^2) = (2/pi) arctan(a).
  double gamma() const;
  /// kappa = 4B / (pi (A - B) (2 gamma - 1)).
  double kappa() const;
  /// Throws InvalidParams unless gamma > 1/2, A > B > 0, kappa < 1 and v > 0.
  void validate() const;
};

struct BaiBoundResult {
  double bound = 0.0;
  double prefactor = 0.0;         ///< 1 / (pi (1 - kappa)(2 gamma - 1))
  double transform_term = 0.0;    ///< int_{-A}^{A} |f - g| du
  double tail_term = 0.0;         ///< 2 pi / v * int_{|x| > B} |F - G| dx
  double smoothness_term = 0.0;   ///< 1 / v * sup_x int_{|y| <= 2va} |G(x + y) - G(x)| dy
  double discretization_error = 0.0;  ///< prefactor * Richardson estimate for the transform term
  double gamma = 0.0;
  double kappa = 0.0;
};

/// Uniform grid on [-A, A] with spacing v / 10 (endpoints included).
std::vector<double> bai_grid(const BaiBoundParams& params);

/// Right-hand side of the smoothing inequality for F against the semicircle G.
/// f_transform[i] is the Stieltjes transform of F at u_grid[i] + i v. The grid must cover
/// [-A, A] with spacing at most v / 10 (GridTooCoarse otherwise).
BaiBoundResult bai_bound(std::span<const double> u_grid,
                         std::span<const std::complex<double>> f_transform, const SemicircleLaw& g,
                         const StepCDF& F, const BaiBoundParams& params);

/// Convenience overload: builds the default grid and the empirical transform of the spectrum.
BaiBoundResult bai_bound(const EmpiricalSpectrum& spectrum, const SemicircleLaw& g,
                         const BaiBoundParams& params);

/// Inversion of E s_n(z) = -(z - delta - sqrt((z + delta)^2 - 4)) / 2 for delta.
struct DeltaDiagnostic {
  ComplexPoint z;
  std::complex<double> measured_Esn;
  std::complex<double> solved_delta;
  double residual = 0.0;  ///< |measured_Esn - reconstruction(solved_delta)|
  int iterations = 0;
};

/// Right-hand side of the E s_n / delta relation, equal to s(z + delta) + delta.
std::complex<double> esn_from_delta(std::complex<double> z, std::complex<double> delta);

/// t_n(z) = 1 / (z + E s_n(z)).
inline std::complex<double> t_n(std::complex<double> z, std::complex<double> Esn) {
  return 1.0 / (z + Esn);
}

inline constexpr int kDeltaMaxIterations = 200;

/// Damped Newton from delta = 0. Throws InvalidParams if Im measured_Esn <= 0 and
/// NoConvergence if the residual is not below 1e-10 within 200 iterations.
DeltaDiagnostic delta_solve(std::complex<double> measured_Esn, const ComplexPoint& z);

}  // namespace qrmt
