#include "qrmt/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qrmt/ensemble.hpp"
#include "qrmt/errors.hpp"
#include "qrmt/experiment.hpp"
#include "qrmt/quadrature.hpp"
#include "qrmt/quaternion.hpp"
#include "qrmt/resolvent.hpp"
#include "qrmt/rng.hpp"
#include "qrmt/semicircle.hpp"
#include "qrmt/spectra.hpp"
#include "qrmt/stieltjes.hpp"
#include "qrmt/structure.hpp"

namespace qrmt {

namespace {

using cd = std::complex<double>;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Eigen::MatrixXcd sample_expansion(const EntryLawSpec& spec, int n, std::uint64_t seed) {
  return expand_hermitian(scaled_matrix(sample_matrix(spec, n, seed)));
}

EmpiricalSpectrum sample_spectrum(const EntryLawSpec& spec, int n, std::uint64_t seed) {
  return hermitian_eigenvalues(sample_expansion(spec, n, seed));
}

Eigen::MatrixXcd shifted(Eigen::MatrixXcd m, cd z) {
  m.diagonal().array() -= z;
  return m;
}

// Type-II matrix with complex normal quaternion blocks and complex scalar diagonal.
Eigen::MatrixXcd random_type2(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const cd t(g(rng), g(rng));
    m(2 * j, 2 * j) = t;
    m(2 * j + 1, 2 * j + 1) = t;
    for (int k = j + 1; k < n; ++k) {
      const cd alpha(g(rng), g(rng)), beta(g(rng), g(rng));
      m(2 * j, 2 * k) = alpha;
      m(2 * j, 2 * k + 1) = beta;
      m(2 * j + 1, 2 * k) = -std::conj(beta);
      m(2 * j + 1, 2 * k + 1) = std::conj(alpha);
      m(2 * k, 2 * j) = std::conj(alpha);
      m(2 * k, 2 * j + 1) = -beta;
      m(2 * k + 1, 2 * j) = std::conj(beta);
      m(2 * k + 1, 2 * j + 1) = alpha;
    }
  }
  return m;
}

const EntryLawSpec kGse{};

}  // namespace

Suite parse_suite(const std::string& name) {
  if (name == "structural") return Suite::structural;
  if (name == "inequalities") return Suite::inequalities;
  if (name == "all") return Suite::all;
  throw ConfigError("unknown suite '" + name + "'");
}

CheckResult check_quaternion_algebra(std::uint64_t seed) {
  CheckResult r{1, "quaternion algebra and 2x2 image", false, "", 0.0, 1.0};
  using Q = Quaterniond;
  const Q e[4] = {Q::one(), Q::i1(), Q::i2(), Q::i3()};
  // table[p][q] = e_p e_q as (sign, index)
  const int sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  const int index[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  bool table_ok = true;
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      const Q expected = static_cast<double>(sign[p][q]) * e[index[p][q]];
      table_ok = table_ok && qmul(e[p], e[q]) == expected;
      table_ok = table_ok && quat_to_block(e[p]) * quat_to_block(e[q]) == quat_to_block(expected);
    }
    const Q c = qconj(e[p]);
    table_ok = table_ok && c == (p == 0 ? e[0] : -e[p]);
    table_ok = table_ok && quat_to_block(c) == quat_to_block(e[p]).adjoint();
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Q p{u(rng), u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng), u(rng)};
    worst = std::max(worst, (quat_to_block(p) * quat_to_block(q) - quat_to_block(qmul(p, q))).cwiseAbs().maxCoeff());
    worst = std::max(worst, (quat_to_block(qconj(p)) - quat_to_block(p).adjoint()).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(qnorm(qmul(p, q)) - qnorm(p) * qnorm(q)));
  }
  r.passed = table_ok && worst <= 1e-14;
  r.detail = std::string("table ") + (table_ok ? "exact" : "MISMATCH") + ", homomorphism residual " + fmt(worst);
  return r;
}

CheckResult check_even_multiplicity(std::uint64_t seed) {
  CheckResult r{2, "even multiplicity of GSE spectra", false, "", 0.0, 30.0};
  double worst = 0.0;
  for (int n : {10, 50, 200}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto spec = hermitian_eigenvalues(sample_expansion(kGse, n, derive_key(seed, n, rep)), kPairingTolerance, false);
      worst = std::max(worst, even_multiplicity_check(spec, std::numeric_limits<double>::infinity()).max_relative_gap);
    }
  }
  r.passed = worst <= 1e-8;
  r.detail = "max relative pairing gap " + fmt(worst);
  return r;
}

CheckResult check_type2_inverse(std::uint64_t seed) {
  CheckResult r{3, "Type-II inverse is Type-I", false, "", 0.0, 30.0};
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const auto rep = verify_inverse_type1(random_type2(20, rng), 1e-10);
    worst = std::max(worst, rep.structural_residual / detail::scale_of(rep.inverse));
    failures += rep.is_type1 ? 0 : 1;
  }
  std::uniform_real_distribution<double> uu(-2.5, 2.5), vv(0.05, 1.0);
  for (int i = 0; i < 50; ++i) {
    const cd z(uu(rng), vv(rng));
    const auto rep = verify_inverse_type1(shifted(sample_expansion(kGse, 20, derive_key(seed, 20, i)), z), 1e-10);
    worst = std::max(worst, rep.structural_residual / detail::scale_of(rep.inverse));
    failures += rep.is_type1 ? 0 : 1;
  }
  r.passed = failures == 0 && worst <= 1e-10;
  r.detail = std::to_string(150 - failures) + "/150 Type-I, max scaled residual " + fmt(worst);
  return r;
}

CheckResult check_epsilon_scalar(std::uint64_t seed) {
  CheckResult r{4, "eps_k is a scalar matrix", false, "", 0.0, 0.0};
  const int n = 50;
  const ComplexPoint z(0.5, 0.3);
  const auto y = sample_matrix(kGse, n, derive_key(seed, n));
  const Eigen::MatrixXcd h = expand_hermitian(scaled_matrix(y));
  const cd sn = resolvent(h, z).D.trace() / (2.0 * n);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto eps = epsilon_k(minor_resolvent(h, k, z), y(k, k), sn, n);
    worst = std::max(worst, eps.scalar_deviation);
  }
  r.passed = worst <= 1e-10;
  r.detail = "max scalar deviation " + fmt(worst) + " over " + std::to_string(n) + " minors";
  return r;
}

CheckResult check_trace_interlacing(std::uint64_t seed) {
  CheckResult r{5, "trace interlacing |tr D - tr D_k| <= 2/v", false, "", 0.0, 0.0};
  const int n = 32;
  int violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (double v : {0.1, 0.3, 1.0}) {
    const Eigen::MatrixXcd h = sample_expansion(kGse, n, derive_key(seed, n, static_cast<std::uint64_t>(v * 1000)));
    const ComplexPoint z(0.3, v);
    for (int k = 0; k < n; ++k) {
      const auto ctx = minor_resolvent(h, k, z);
      const double slack = 2.0 / v - std::abs(ctx.trace_D - ctx.trace_D_k);
      min_slack = std::min(min_slack, slack * v / 2.0);
      violations += slack < 0.0 ? 1 : 0;
    }
  }
  r.passed = violations == 0;
  r.detail = std::to_string(violations) + " violations, min relative slack " + fmt(min_slack);
  return r;
}

CheckResult check_bai_inequality(std::uint64_t seed) {
  CheckResult r{6, "Stieltjes smoothing inequality bounds the Kolmogorov distance", false, "", 0.0, 300.0};
  const SemicircleLaw law(1.0);
  int rows = 0, held = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int n : {50, 200}) {
    BaiBoundParams p;
    p.v = 1.0 / std::sqrt(static_cast<double>(n));
    for (int rep = 0; rep < 20; ++rep) {
      const auto spec = sample_spectrum(kGse, n, derive_key(seed, n, rep));
      const double ks = sup_distance(esd(spec), law);
      const auto b = bai_bound(spec, law, p);
      ++rows;
      held += b.bound >= ks ? 1 : 0;
      min_ratio = std::min(min_ratio, b.bound / ks);
    }
  }
  r.passed = held == rows;
  r.detail = std::to_string(held) + "/" + std::to_string(rows) + " rows, min bound/distance " + fmt(min_ratio);
  return r;
}

CheckResult check_perturbation_bounds(std::uint64_t seed) {
  CheckResult r{7, "rank and Levy perturbation bounds", false, "", 0.0, 0.0};
  int rank_violations = 0, levy_violations = 0, cases = 0;
  for (int n : {8, 32}) {
    for (int rep = 0; rep < 50; ++rep) {
      const std::uint64_t key = derive_key(seed, n, rep);
      const auto s = scaled_matrix(sample_matrix(kGse, n, key));
      auto t = s;
      CounterStream pick(mix64(key));
      const int j = static_cast<int>(pick() % static_cast<std::uint64_t>(n));
      int k = static_cast<int>(pick() % static_cast<std::uint64_t>(n - 1));
      if (k >= j) ++k;
      const auto fresh = sample_matrix(kGse, n, mix64(key + 1));
      t.set(j, k, (1.0 / std::sqrt(static_cast<double>(n))) * fresh(std::min(j, k), std::max(j, k)));

      const Eigen::MatrixXcd a = expand_hermitian(s), b = expand_hermitian(t);
      const StepCDF fa = esd(hermitian_eigenvalues(a)), fb = esd(hermitian_eigenvalues(b));
      const double dim = 2.0 * n;
      if (sup_distance(fa, fb) > 4.0 / dim) ++rank_violations;
      const double levy = levy_distance(fa, fb);
      if (levy * levy * levy > (a - b).squaredNorm() / dim) ++levy_violations;
      ++cases;
    }
  }
  r.passed = rank_violations == 0 && levy_violations == 0;
  r.detail = std::to_string(cases) + " pairs, rank violations " + std::to_string(rank_violations) +
             ", Levy violations " + std::to_string(levy_violations);
  return r;
}

CheckResult check_semicircle_calculus(std::uint64_t seed) {
  CheckResult r{8, "semicircle density, CDF and Stieltjes transform", false, "", 0.0, 0.0};
  const SemicircleLaw law(1.0);
  auto density = [&](double x) { return law.density(x); };

  const double mass = integrate(density, -2.0, 2.0, 1e-14, 1e-14).value;
  const double mass_err = std::abs(mass - 1.0);

  double cdf_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = -2.5 + 5.0 * (i + 0.5) / 100.0;
    const double q = x <= -2.0 ? 0.0 : integrate(density, -2.0, std::min(x, 2.0), 1e-14, 1e-14).value;
    cdf_err = std::max(cdf_err, std::abs(law.cdf(x) - q));
  }

  // x = 2 sin(theta) turns the density into (2 / pi) cos^2(theta), smooth on [-pi/2, pi/2]
  double s_err = 0.0, s_max = 0.0;
  const double h = std::numbers::pi / 2.0;
  for (double u : {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0}) {
    for (double v : {0.05, 0.2, 1.0, 3.0}) {
      const cd z(u, v);
      auto part = [&](bool imag) {
        return [=](double t) {
          const cd val = (2.0 / std::numbers::pi) * std::cos(t) * std::cos(t) / (2.0 * std::sin(t) - z);
          return imag ? val.imag() : val.real();
        };
      };
      const cd q(integrate(part(false), -h, h, 1e-14, 1e-14).value, integrate(part(true), -h, h, 1e-14, 1e-14).value);
      const cd s = semicircle_stieltjes(z);
      s_err = std::max(s_err, std::abs(s - q));
      s_max = std::max(s_max, std::abs(s));
    }
  }

  int sn_violations = 0;
  for (int n : {10, 50}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto spec = sample_spectrum(kGse, n, derive_key(seed, n, rep));
      const double ks = sup_distance(esd(spec), law);
      for (double u : {-2.5, -1.0, 0.0, 1.0, 2.5}) {
        for (double v : {0.05, 0.3, 1.0}) {
          const ComplexPoint z(u, v);
          const cd sn = empirical_stieltjes(spec, z);
          if (std::abs(sn) > std::numbers::pi / v) ++sn_violations;
          if (std::abs(sn - semicircle_stieltjes(z)) > std::numbers::pi / v * ks) ++sn_violations;
        }
      }
    }
  }

  r.passed = mass_err <= 1e-10 && cdf_err <= 1e-10 && s_err <= 1e-10 && s_max < 1.0 && sn_violations == 0;
  r.detail = "mass error " + fmt(mass_err) + ", CDF error " + fmt(cdf_err) + ", s(z) error " + fmt(s_err) +
             ", max |s| " + fmt(s_max) + ", s_n violations " + std::to_string(sn_violations);
  return r;
}

CheckResult check_rate_sweep(std::uint64_t seed) {
  CheckResult r{9, "Kolmogorov rate sweep (GSE)", false, "", 0.0, 900.0};
  SweepConfig cfg;
  cfg.n_list = {64, 128, 256, 512, 1024};
  cfg.reps = 10;
  cfg.seed = seed;
  cfg.timing = false;
  const SweepResult res = run_sweep(cfg);
  const RateFit fit = fit_rate(res.rows, Distance::kolmogorov);

  bool decreasing = true;
  for (std::size_t i = 1; i < fit.mean.size(); ++i) decreasing = decreasing && fit.mean[i] < fit.mean[i - 1];
  const bool slope_ok = fit.slope <= -0.40 + 0.05;
  bool bounded = true;
  for (double c : fit.bound_constant) bounded = bounded && c <= 1.5 * fit.bound_constant.front();

  bool expected_ok = res.aggregates.size() == cfg.n_list.size();
  if (expected_ok) {
    const double c0 = res.aggregates.front().kolmogorov * std::sqrt(static_cast<double>(res.aggregates.front().n));
    for (const auto& a : res.aggregates) {
      expected_ok = expected_ok && a.kolmogorov * std::sqrt(static_cast<double>(a.n)) <= 1.5 * c0;
    }
  }

  r.passed = decreasing && slope_ok && bounded && expected_ok;
  std::ostringstream os;
  os << "(a) " << (decreasing ? "decreasing" : "NOT decreasing") << " means";
  for (double m : fit.mean) os << ' ' << fmt(m);
  os << "; (b) slope " << fmt(fit.slope) << "; (c) max C(n)/C(64) " << fmt(fit.max_bound_constant / fit.bound_constant.front())
     << "; (d) expected-ESD " << (expected_ok ? "bounded" : "NOT bounded");
  for (const auto& a : res.aggregates) os << ' ' << fmt(a.kolmogorov);
  r.detail = os.str();
  return r;
}

CheckResult check_truncation_pipeline(std::uint64_t seed) {
  CheckResult r{10, "truncation pipeline (heavy tail, index 7)", false, "", 0.0, 0.0};
  EntryLawSpec heavy;
  heavy.kind = EntryLaw::heavy_tail;
  heavy.tail_index = 7.0;

  int rank_violations = 0, truncated_entries = 0;
  double sw_mean_1024 = 0.0;
  for (int n : {256, 1024}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto y = sample_matrix(heavy, n, derive_key(seed, n, rep));
      const auto stages = truncation_stages(heavy, y);
      const auto fs = esd(hermitian_eigenvalues(expand_hermitian(scaled_matrix(y))));
      const int c = stages.report.count_truncated;
      truncated_entries += c;
      if (c > 0) {
        const auto ft = esd(hermitian_eigenvalues(expand_hermitian(scaled_matrix(stages.tilde))));
        const double bound = (2.0 * stages.report.count_offdiag + stages.report.count_diag) / n;
        if (sup_distance(fs, ft) > bound) ++rank_violations;
      }
      if (n == 1024) {
        if (stages.report.below_guard) throw DegenerateVariance("truncated variance below guard");
        const auto fw = esd(hermitian_eigenvalues(expand_hermitian(scaled_matrix(stages.w))));
        sw_mean_1024 += sup_distance(fs, fw) / 10.0;
      }
    }
  }

  SweepConfig cfg;
  cfg.ensemble = heavy;
  cfg.pipeline = Pipeline::truncated;
  cfg.n_list = {64, 128, 256, 512, 1024};
  cfg.reps = 10;
  cfg.seed = seed;
  cfg.timing = false;
  const SweepResult res = run_sweep(cfg);
  const RateFit fit = fit_rate(res.rows, Distance::kolmogorov);

  r.passed = rank_violations == 0 && sw_mean_1024 <= 0.05 && fit.slope <= -0.40 + 0.05;
  r.detail = "rank violations " + std::to_string(rank_violations) + " (" + std::to_string(truncated_entries) +
             " truncated entries), mean ||F^s - F^w|| at n=1024 " + fmt(sw_mean_1024) + ", W_n slope " + fmt(fit.slope);
  return r;
}

CheckResult check_delta_diagnostic(std::uint64_t seed) {
  CheckResult r{11, "delta_n diagnostic", false, "", 0.0, 0.0};
  const ComplexPoint z(0.5, 0.2);
  auto measured = [&](int n) {
    cd sum{0.0, 0.0};
    for (int rep = 0; rep < 100; ++rep) sum += empirical_stieltjes(sample_spectrum(kGse, n, derive_key(seed, n, rep)), z);
    return delta_solve(sum / 100.0, z);
  };
  const auto small = measured(64);
  const auto large = measured(512);
  const bool residual_ok = small.residual <= 1e-9 && large.residual <= 1e-9;
  const bool decreasing = std::abs(large.solved_delta) < std::abs(small.solved_delta);
  r.passed = residual_ok && decreasing;
  r.detail = "|delta| n=64 " + fmt(std::abs(small.solved_delta)) + ", n=512 " + fmt(std::abs(large.solved_delta)) +
             ", residuals " + fmt(small.residual) + " / " + fmt(large.residual);
  return r;
}

std::vector<NamedCheck> suite_checks(Suite suite) {
  const std::vector<NamedCheck> all = {
      {1, check_quaternion_algebra},  {2, check_even_multiplicity},   {3, check_type2_inverse},
      {4, check_epsilon_scalar},      {5, check_trace_interlacing},   {6, check_bai_inequality},
      {7, check_perturbation_bounds}, {8, check_semicircle_calculus}, {9, check_rate_sweep},
      {10, check_truncation_pipeline}, {11, check_delta_diagnostic}};
  const int lo = suite == Suite::inequalities ? 6 : 1;
  const int hi = suite == Suite::structural ? 5 : suite == Suite::inequalities ? 8 : 11;
  std::vector<NamedCheck> out;
  for (const auto& c : all) {
    if (c.id >= lo && c.id <= hi) out.push_back(c);
  }
  return out;
}

CheckResult run_check(const NamedCheck& check, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = check.run(seed);
  } catch (const std::exception& e) {
    r.id = check.id;
    r.title = "check " + std::to_string(check.id);
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
    r.passed = false;
    r.detail += "; over time limit " + fmt(r.time_limit) + " s";
  }
  return r;
}

std::string format_check(const CheckResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f s", r.seconds);
  return std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.title + " (" + buf +
         "): " + r.detail;
}

}  // namespace qrmt
