#include "qrmt/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrmt/errors.hpp"

namespace qrmt {

ComplexPoint::ComplexPoint(double u_, double v_) : u(u_), v(v_) {
  if (!(v_ > 0.0)) throw InvalidParams("z must lie in the upper half-plane (v > 0)");
}

SemicircleLaw::SemicircleLaw(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParams("semicircle scale must be > 0");
}

double SemicircleLaw::density(double x) const {
  const double r = 4.0 * sigma_ * sigma_ - x * x;
  if (r <= 0.0) return 0.0;
  return std::sqrt(r) / (2.0 * M_PI * sigma_ * sigma_);
}

double SemicircleLaw::cdf(double x) const {
  if (x <= -edge()) return 0.0;
  if (x >= edge()) return 1.0;
  const double s2 = sigma_ * sigma_;
  const double value = 0.5 + x * std::sqrt(4.0 * s2 - x * x) / (4.0 * M_PI * s2) +
                       std::asin(x / edge()) / M_PI;
  return std::clamp(value, 0.0, 1.0);
}

double SemicircleLaw::quantile(double p) const {
  if (p <= 0.0) return -edge();
  if (p >= 1.0) return edge();
  double lo = -edge(), hi = edge();
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cdf(mid) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double SemicircleLaw::cdf_antiderivative(double x) const {
  // E (x - X)^+ = x G(x) - int_{-2s}^{x} t f(t) dt, and the latter is -(4s^2 - x^2)^{3/2} / (6 pi s^2).
  if (x <= -edge()) return 0.0;
  if (x >= edge()) return x;
  const double s2 = sigma_ * sigma_;
  const double r = 4.0 * s2 - x * x;
  return x * cdf(x) + r * std::sqrt(r) / (6.0 * M_PI * s2);
}

std::complex<double> SemicircleLaw::stieltjes(std::complex<double> z) const {
  return semicircle_stieltjes(z / sigma_) / sigma_;
}

std::complex<double> semicircle_stieltjes(std::complex<double> z) {
  const std::complex<double> root = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  return -0.5 * (z - root);
}

std::complex<double> empirical_stieltjes(const EmpiricalSpectrum& spectrum, const ComplexPoint& z) {
  const auto& lam = spectrum.eigenvalues;
  if (lam.size() == 0) return {0.0, 0.0};
  const std::complex<double> zz = z.z();
  std::complex<double> sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < lam.size(); ++i) sum += 1.0 / (lam(i) - zz);
  return sum / static_cast<double>(lam.size());
}

std::vector<std::complex<double>> empirical_stieltjes_on_grid(const EmpiricalSpectrum& spectrum,
                                                              std::span<const double> u_grid, double v) {
  const ComplexPoint probe(0.0, v);  // validates v
  std::vector<std::complex<double>> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) out.push_back(empirical_stieltjes(spectrum, ComplexPoint(u, probe.v)));
  return out;
}

double BaiBoundParams::gamma() const { return 2.0 / M_PI * std::atan(a); }

double BaiBoundParams::kappa() const {
  return 4.0 * B / (M_PI * (A - B) * (2.0 * gamma() - 1.0));
}

void BaiBoundParams::validate() const {
  if (!(v > 0.0)) throw InvalidParams("smoothing bound needs v > 0");
  if (!(gamma() > 0.5)) {
    throw InvalidParams("gamma = (2/pi) arctan(a) must exceed 1/2 (a = " + std::to_string(a) + ")");
  }
  if (!(B > 0.0) || !(A > B)) throw InvalidParams("smoothing bound needs A > B > 0");
  if (!(kappa() < 1.0)) {
    throw InvalidParams("kappa = " + std::to_string(kappa()) + " must be < 1");
  }
}

std::vector<double> bai_grid(const BaiBoundParams& params) {
  params.validate();
  const double spacing = params.v / 10.0;
  const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * params.A / spacing));
  std::vector<double> grid(intervals + 1);
  const double h = 2.0 * params.A / static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) grid[i] = -params.A + h * static_cast<double>(i);
  grid.back() = params.A;
  return grid;
}

namespace {

// Trapezoid rule for a sampled function over [lo, hi], clipping the outer segments.
double clipped_trapezoid(std::span<const double> x, std::span<const double> y, double lo, double hi) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double p = x[i], q = x[i + 1];
    if (q <= lo || p >= hi) continue;
    const double slope = (y[i + 1] - y[i]) / (q - p);
    const double yp = p < lo ? y[i] + slope * (lo - p) : y[i];
    const double yq = q > hi ? y[i] + slope * (hi - p) : y[i + 1];
    p = std::max(p, lo);
    q = std::min(q, hi);
    total += 0.5 * (yp + yq) * (q - p);
  }
  return total;
}

// int_p^q |c - G(x)| dx for nondecreasing G with antiderivative Phi.
double abs_gap_integral(const SemicircleLaw& g, double c, double p, double q) {
  if (q <= p) return 0.0;
  const double gp = g.cdf(p), gq = g.cdf(q);
  const double phi_p = g.cdf_antiderivative(p), phi_q = g.cdf_antiderivative(q);
  if (gp >= c) return (phi_q - phi_p) - c * (q - p);
  if (gq <= c) return c * (q - p) - (phi_q - phi_p);
  const double x = std::clamp(g.quantile(c), p, q);
  const double phi_x = g.cdf_antiderivative(x);
  return (c * (x - p) - (phi_x - phi_p)) + ((phi_q - phi_x) - c * (q - x));
}

// int_{|x| > B} |F - G| dx, exactly, splitting at the jumps of F and the support edges of G.
double tail_integral(const StepCDF& F, const SemicircleLaw& g, double B) {
  const auto& jumps = F.jumps();
  double total = 0.0;

  std::vector<double> right{B};
  for (double x : jumps) if (x > B) right.push_back(x);
  if (g.edge() > B) right.push_back(g.edge());
  std::sort(right.begin(), right.end());
  for (std::size_t i = 0; i + 1 < right.size(); ++i) {
    total += abs_gap_integral(g, F.cdf(right[i]), right[i], right[i + 1]);
  }

  std::vector<double> left{-B};
  for (double x : jumps) if (x < -B) left.push_back(x);
  if (-g.edge() < -B) left.push_back(-g.edge());
  std::sort(left.begin(), left.end());
  for (std::size_t i = 0; i + 1 < left.size(); ++i) {
    total += abs_gap_integral(g, F.cdf(left[i]), left[i], left[i + 1]);
  }
  return total;
}

// sup_x int_{|y| <= h} |G(x + y) - G(x)| dy = sup_x Phi(x + h) + Phi(x - h) - 2 Phi(x).
double window_increment_sup(const SemicircleLaw& g, double h, double step) {
  auto window = [&](double x) {
    return g.cdf_antiderivative(x + h) + g.cdf_antiderivative(x - h) - 2.0 * g.cdf_antiderivative(x);
  };
  double best = window(0.0);
  const double span = g.edge() + h;
  for (double x = -span; x <= span; x += step) best = std::max(best, window(x));
  return best;
}

}  // namespace

BaiBoundResult bai_bound(std::span<const double> u_grid,
                         std::span<const std::complex<double>> f_transform, const SemicircleLaw& g,
                         const StepCDF& F, const BaiBoundParams& params) {
  params.validate();
  if (u_grid.size() != f_transform.size() || u_grid.size() < 2) {
    throw InvalidParams("transform samples must match the u grid");
  }
  const double max_spacing = params.v / 10.0 * (1.0 + 1e-12);
  if (u_grid.front() > -params.A || u_grid.back() < params.A) {
    throw GridTooCoarse("u grid does not cover [-A, A]");
  }
  for (std::size_t i = 0; i + 1 < u_grid.size(); ++i) {
    const double spacing = u_grid[i + 1] - u_grid[i];
    if (!(spacing > 0.0)) throw InvalidParams("u grid must be strictly increasing");
    if (spacing > max_spacing) {
      throw GridTooCoarse("u grid spacing " + std::to_string(spacing) + " exceeds v/10");
    }
  }

  BaiBoundResult r;
  r.gamma = params.gamma();
  r.kappa = params.kappa();
  r.prefactor = 1.0 / (M_PI * (1.0 - r.kappa) * (2.0 * r.gamma - 1.0));

  std::vector<double> gap(u_grid.size());
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    gap[i] = std::abs(f_transform[i] - g.stieltjes({u_grid[i], params.v}));
  }
  r.transform_term = clipped_trapezoid(u_grid, gap, -params.A, params.A);

  // Richardson estimate from the half-resolution rule (every other sample, keeping the last).
  std::vector<double> coarse_x, coarse_y;
  for (std::size_t i = 0; i < u_grid.size(); i += 2) {
    coarse_x.push_back(u_grid[i]);
    coarse_y.push_back(gap[i]);
  }
  if (coarse_x.back() != u_grid.back()) {
    coarse_x.push_back(u_grid.back());
    coarse_y.push_back(gap.back());
  }
  const double coarse = clipped_trapezoid(coarse_x, coarse_y, -params.A, params.A);
  r.discretization_error = r.prefactor * std::abs(r.transform_term - coarse) / 3.0;

  r.tail_term = 2.0 * M_PI / params.v * tail_integral(F, g, params.B);

  const double h = 2.0 * params.v * params.a;
  r.smoothness_term = window_increment_sup(g, h, params.v * params.a / 5.0) / params.v;

  r.bound = r.prefactor * (r.transform_term + r.tail_term + r.smoothness_term);
  return r;
}

BaiBoundResult bai_bound(const EmpiricalSpectrum& spectrum, const SemicircleLaw& g,
                         const BaiBoundParams& params) {
  const auto grid = bai_grid(params);
  const auto f = empirical_stieltjes_on_grid(spectrum, grid, params.v);
  return bai_bound(grid, f, g, esd(spectrum), params);
}

std::complex<double> esn_from_delta(std::complex<double> z, std::complex<double> delta) {
  const std::complex<double> w = z + delta;
  const std::complex<double> root = std::sqrt(w - 2.0) * std::sqrt(w + 2.0);
  return -0.5 * (z - delta - root);
}

DeltaDiagnostic delta_solve(std::complex<double> measured_Esn, const ComplexPoint& z) {
  if (!(measured_Esn.imag() > 0.0)) throw InvalidParams("measured E s_n must have Im > 0");
  const std::complex<double> zz = z.z();
  auto residual_of = [&](std::complex<double> d) { return esn_from_delta(zz, d) - measured_Esn; };

  DeltaDiagnostic out;
  out.z = z;
  out.measured_Esn = measured_Esn;
  std::complex<double> delta{0.0, 0.0};
  std::complex<double> r = residual_of(delta);
  int it = 0;
  for (; it < kDeltaMaxIterations && std::abs(r) > 1e-14; ++it) {
    // d/d(delta) [s(z + delta) + delta] = 1 + s'(w), s'(w) = -s / (2 s + w).
    const std::complex<double> w = zz + delta;
    const std::complex<double> s = esn_from_delta(zz, delta) - delta;
    const std::complex<double> deriv = 1.0 - s / (2.0 * s + w);
    std::complex<double> step = -r / deriv;
    double damping = 1.0;
    std::complex<double> trial = delta + step;
    std::complex<double> rt = residual_of(trial);
    while (std::abs(rt) >= std::abs(r) && damping > 1e-6) {
      damping *= 0.5;
      trial = delta + damping * step;
      rt = residual_of(trial);
    }
    if (std::abs(rt) >= std::abs(r)) break;
    delta = trial;
    r = rt;
  }
  out.iterations = it;
  out.solved_delta = delta;
  out.residual = std::abs(r);
  if (!(out.residual <= 1e-10)) {
    throw NoConvergence("delta root-finding stalled at residual " + std::to_string(out.residual));
  }
  return out;
}

}  // namespace qrmt
