#include "qrmt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

namespace qrmt {

EmpiricalSpectrum hermitian_eigenvalues(const HermitianExpansion<double>& h, double tol,
                                        bool check_pairing) {
  if (!(tol > 0.0)) throw InvalidParams("eigenvalue tolerance must be positive");
  if (h.rows() != h.cols() || h.rows() % 2 != 0) {
    throw OddDimension("expansion must be square with even dimension");
  }
  EmpiricalSpectrum out;
  out.n = static_cast<int>(h.rows() / 2);
  if (h.rows() == 0) return out;

  Eigen::SelfAdjointEigenSolver<HermitianExpansion<double>> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    // Paired spectra occasionally exhaust Eigen's fixed QL iteration budget. Reversing the
    // index order is a permutation similarity with a different reduction path.
    const HermitianExpansion<double> reversed = h.reverse();
    solver.compute(reversed, Eigen::EigenvaluesOnly);
  }
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("Hermitian eigensolver did not converge (dimension " +
                             std::to_string(h.rows()) + ")");
  }
  out.eigenvalues = solver.eigenvalues();
  std::sort(out.eigenvalues.data(), out.eigenvalues.data() + out.eigenvalues.size());
  if (check_pairing) even_multiplicity_check(out, tol);
  return out;
}

PairingReport even_multiplicity_check(const EmpiricalSpectrum& spectrum, double tol) {
  if (!(tol > 0.0)) throw InvalidParams("pairing tolerance must be positive");
  const auto& lam = spectrum.eigenvalues;
  if (lam.size() % 2 != 0) {
    throw PairingViolation("odd number of eigenvalues cannot pair up",
                           static_cast<std::size_t>(lam.size() - 1));
  }
  PairingReport report;
  for (Eigen::Index i = 0; i + 1 < lam.size(); i += 2) {
    const double gap = lam(i + 1) - lam(i);
    const double rel = gap / std::max(1.0, std::abs(lam(i + 1)));
    report.max_gap = std::max(report.max_gap, gap);
    if (rel > report.max_relative_gap) {
      report.max_relative_gap = rel;
      report.worst_index = static_cast<std::size_t>(i);
    }
    if (!(rel <= tol)) {
      throw PairingViolation("eigenvalues " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                 " differ by " + std::to_string(gap),
                             static_cast<std::size_t>(i));
    }
  }
  return report;
}

StepCDF StepCDF::from_atoms(std::span<const double> atoms) {
  StepCDF out;
  if (atoms.empty()) return out;
  std::vector<double> sorted(atoms.begin(), atoms.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!out.jumps_.empty() && out.jumps_.back() == sorted[i]) {
      out.cumulative_.back() = static_cast<double>(i + 1) / m;
    } else {
      out.jumps_.push_back(sorted[i]);
      out.cumulative_.push_back(static_cast<double>(i + 1) / m);
    }
  }
  return out;
}

StepCDF StepCDF::average(std::span<const StepCDF> cdfs) {
  StepCDF out;
  if (cdfs.empty()) return out;
  std::vector<std::pair<double, double>> masses;
  const double w = 1.0 / static_cast<double>(cdfs.size());
  for (const auto& f : cdfs) {
    double prev = 0.0;
    for (std::size_t i = 0; i < f.jumps_.size(); ++i) {
      masses.emplace_back(f.jumps_[i], w * (f.cumulative_[i] - prev));
      prev = f.cumulative_[i];
    }
  }
  std::sort(masses.begin(), masses.end());
  double total = 0.0;
  for (const auto& [x, mass] : masses) {
    total += mass;
    if (!out.jumps_.empty() && out.jumps_.back() == x) {
      out.cumulative_.back() = total;
    } else {
      out.jumps_.push_back(x);
      out.cumulative_.push_back(total);
    }
  }
  for (auto& c : out.cumulative_) c = std::min(c, 1.0);
  if (!out.cumulative_.empty()) out.cumulative_.back() = 1.0;
  return out;
}

double StepCDF::cdf(double x) const {
  const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), x);
  if (it == jumps_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
}

double StepCDF::cdf_left(double x) const {
  const auto it = std::lower_bound(jumps_.begin(), jumps_.end(), x);
  if (it == jumps_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
}

StepCDF esd(const EmpiricalSpectrum& spectrum) {
  return StepCDF::from_atoms(
      std::span<const double>(spectrum.eigenvalues.data(), static_cast<std::size_t>(spectrum.eigenvalues.size())));
}

double sup_distance(const StepCDF& f, const StepCDF& g) {
  // Both are constant between consecutive points of the merged jump set, so the supremum
  // is attained at one of those points.
  double best = 0.0;
  for (double x : f.jumps()) best = std::max(best, std::abs(f.cdf(x) - g.cdf(x)));
  for (double x : g.jumps()) best = std::max(best, std::abs(f.cdf(x) - g.cdf(x)));
  return best;
}

double sup_distance(const StepCDF& f, const SemicircleLaw& g) {
  double best = 0.0;
  const auto& x = f.jumps();
  const auto& c = f.cumulative();
  double prev = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double gx = g.cdf(x[i]);
    best = std::max({best, std::abs(gx - c[i]), std::abs(gx - prev)});
    prev = c[i];
  }
  return best;
}

namespace {

template <typename G>
bool band_holds(const StepCDF& f, const G& g, double eps) {
  const auto& x = f.jumps();
  const auto& c = f.cumulative();
  const std::size_t m = x.size();
  // Lower edge: on [x_i, x_{i+1}) F = c_i must dominate sup G(t - eps) - eps = G((x_{i+1} - eps)^-) - eps.
  double level = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (level < g.cdf_left(x[i] - eps) - eps) return false;
    level = c[i];
  }
  // Upper edge: on [x_i, x_{i+1}) F = c_i must stay below inf G(t + eps) + eps = G(x_i + eps) + eps.
  for (std::size_t i = 0; i < m; ++i) {
    if (c[i] > g.cdf(x[i] + eps) + eps) return false;
  }
  return true;
}

template <typename G>
double levy_bisect(const StepCDF& f, const G& g, double accuracy) {
  if (f.empty()) throw InvalidParams("Levy distance needs a non-empty step CDF");
  if (band_holds(f, g, 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > accuracy) {
    const double mid = 0.5 * (lo + hi);
    if (band_holds(f, g, mid)) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace

bool levy_band_holds(const StepCDF& f, const StepCDF& g, double eps) { return band_holds(f, g, eps); }
bool levy_band_holds(const StepCDF& f, const SemicircleLaw& g, double eps) { return band_holds(f, g, eps); }

double levy_distance(const StepCDF& f, const StepCDF& g, double accuracy) {
  return levy_bisect(f, g, accuracy);
}

double levy_distance(const StepCDF& f, const SemicircleLaw& g, double accuracy) {
  return levy_bisect(f, g, accuracy);
}

}  // namespace qrmt
