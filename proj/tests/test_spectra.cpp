#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qrmt/ensemble.hpp"
#include "qrmt/rng.hpp"
#include "qrmt/spectra.hpp"

using namespace qrmt;

namespace {

EmpiricalSpectrum spectrum_of(std::vector<double> values) {
  EmpiricalSpectrum s;
  s.eigenvalues = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  s.n = static_cast<int>(values.size() / 2);
  return s;
}

// Smallest eps on a uniform scan for which the Levy band holds everywhere on a fine x grid.
template <typename FA, typename FB>
double levy_scan(const FA& f, const FB& g, double lo, double hi, double eps_step) {
  std::vector<double> xs;
  for (double x = lo; x <= hi; x += 1e-3) xs.push_back(x);
  for (double eps = 0.0; eps <= 1.0 + eps_step; eps += eps_step) {
    bool ok = true;
    for (double x : xs) {
      const double fx = f(x);
      if (g(x - eps) - eps > fx + 1e-15 || fx > g(x + eps) + eps + 1e-15) {
        ok = false;
        break;
      }
    }
    if (ok) return eps;
  }
  return 1.0;
}

}  // namespace

TEST_CASE("expand_hermitian layout") {
  QSelfDualMatrixd d(3);
  d.set_diagonal(0, 1.0);
  d.set_diagonal(1, -2.0);
  d.set_diagonal(2, 0.5);
  const auto h = expand_hermitian(d);
  Eigen::VectorXcd expected(6);
  expected << 1, 1, -2, -2, 0.5, 0.5;
  CHECK(h.diagonal() == expected);
  CHECK(h.cwiseAbs().sum() == doctest::Approx(7.0));

  QSelfDualMatrixd one(1);
  one.set_diagonal(0, 5.0);
  CHECK(expand_hermitian(one) == 5.0 * Eigen::MatrixXcd::Identity(2, 2));

  const auto y = sample_matrix(EntryLawSpec{}, 4, 2);
  const auto hy = expand_hermitian(y);
  CHECK(hy.block<2, 2>(2, 6) == quat_to_block(y(1, 3)));
}

TEST_CASE("hermitian eigenvalues") {
  const auto zero = hermitian_eigenvalues(Eigen::MatrixXcd::Zero(8, 8));
  CHECK(zero.eigenvalues.cwiseAbs().maxCoeff() == 0.0);

  QSelfDualMatrixd one(1);
  one.set_diagonal(0, 5.0);
  const auto five = hermitian_eigenvalues(expand_hermitian(one));
  CHECK(five.eigenvalues(0) == doctest::Approx(5.0));
  CHECK(five.eigenvalues(1) == doctest::Approx(5.0));

  // [[0, I], [I, 0]] has characteristic polynomial (l^2 - 1)^2
  QSelfDualMatrixd pair(2);
  pair.set(0, 1, Quaterniond::one());
  const auto ev = hermitian_eigenvalues(expand_hermitian(pair)).eigenvalues;
  CHECK(ev(0) == doctest::Approx(-1.0));
  CHECK(ev(1) == doctest::Approx(-1.0));
  CHECK(ev(2) == doctest::Approx(1.0));
  CHECK(ev(3) == doctest::Approx(1.0));

  CHECK_THROWS_AS(hermitian_eigenvalues(Eigen::MatrixXcd::Zero(4, 4), 0.0), InvalidParams);
  CHECK_THROWS_AS(hermitian_eigenvalues(Eigen::MatrixXcd::Zero(3, 3)), OddDimension);
}

TEST_CASE("eigenvalue sum equals the trace") {
  const auto h = expand_hermitian(scaled_matrix(sample_matrix(EntryLawSpec{}, 40, 77)));
  const auto s = hermitian_eigenvalues(h);
  const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
  CHECK(std::abs(s.eigenvalues.sum() - h.trace().real()) <= 1e-9 * 80 * scale);
  CHECK(std::is_sorted(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size()));
}

TEST_CASE("even multiplicity") {
  const auto s = hermitian_eigenvalues(expand_hermitian(scaled_matrix(sample_matrix(EntryLawSpec{}, 50, 4))));
  CHECK(even_multiplicity_check(s).max_relative_gap <= 1e-8);
  CHECK(even_multiplicity_check(spectrum_of({-1, -1, 1, 1})).max_gap == 0.0);
  CHECK_THROWS_AS(even_multiplicity_check(spectrum_of({0, 1})), PairingViolation);
  bool thrown = false;
  try {
    even_multiplicity_check(spectrum_of({-1, -1, 0, 1}));
  } catch (const PairingViolation& e) {
    thrown = true;
    CHECK(e.index() == 2);
  }
  CHECK(thrown);
}

TEST_CASE("esd") {
  const auto f = esd(spectrum_of({0, 0}));
  CHECK(f.cdf(-1e-12) == 0.0);
  CHECK(f.cdf(0.0) == 1.0);
  const auto g = esd(spectrum_of({-1, -1, 1, 1}));
  CHECK(g.cdf(0.0) == 0.5);
  CHECK(g.cdf(1.0) == 1.0);
  CHECK(g.cdf_left(1.0) == 0.5);

  // mass 1/n on each of the n distinct pairs is the same function
  const auto s = hermitian_eigenvalues(expand_hermitian(scaled_matrix(sample_matrix(EntryLawSpec{}, 20, 3))));
  std::vector<double> pairs;
  for (int i = 0; i < 40; i += 2) pairs.push_back(s.eigenvalues(i));
  const auto half = StepCDF::from_atoms(pairs);
  const auto full = esd(s);
  CHECK(full.cdf(s.eigenvalues(39)) == 1.0);
  for (double x = -3; x <= 3; x += 0.01) CHECK(half.cdf(x) == doctest::Approx(full.cdf(x)).epsilon(1e-15));
}

TEST_CASE("sup distance") {
  const SemicircleLaw law(1.0);
  CHECK(sup_distance(esd(spectrum_of({0, 0, 0, 0})), law) == doctest::Approx(0.5).epsilon(1e-15));
  const auto f = esd(spectrum_of({-1, -1, 0.5, 0.5}));
  CHECK(sup_distance(f, f) == 0.0);

  // atoms at the midpoint quantiles: every jump straddles G by exactly half a step
  for (int n : {3, 10, 50}) {
    const int m = 2 * n;
    std::vector<double> atoms;
    for (int i = 1; i <= m; ++i) atoms.push_back(law.quantile((i - 0.5) / m));
    const auto q = StepCDF::from_atoms(atoms);
    // direct oracle: max over jumps of |G(x) - F(x)| and |G(x) - F(x-)|
    double oracle = 0;
    for (int i = 0; i < m; ++i) {
      const double g = law.cdf(atoms[i]);
      oracle = std::max({oracle, std::abs(g - (i + 1.0) / m), std::abs(g - double(i) / m)});
    }
    CHECK(sup_distance(q, law) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(1.0 / (2 * m)).epsilon(1e-9));
  }

  const auto a = esd(spectrum_of({-1, -1, 0, 0}));
  const auto b = esd(spectrum_of({-0.5, -0.5, 2, 2}));
  CHECK(sup_distance(a, b) == sup_distance(b, a));
  CHECK(sup_distance(a, b) == doctest::Approx(0.5));
}

TEST_CASE("levy distance of two point masses") {
  for (double h : {0.1, 0.4, 0.9, 1.5}) {
    const std::vector<double> at0{0.0}, ath{h};
    const auto f = StepCDF::from_atoms(at0), g = StepCDF::from_atoms(ath);
    const double scan = levy_scan([&](double x) { return f.cdf(x); }, [&](double x) { return g.cdf(x); }, -3, 3, 1e-3);
    CHECK(levy_distance(f, g) == doctest::Approx(std::min(h, 1.0)).epsilon(1e-8));
    CHECK(std::abs(levy_distance(f, g) - scan) <= 1.5e-3);
  }
}

TEST_CASE("levy distance against a brute-force scan") {
  const SemicircleLaw law(1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> a(6), b(8);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = 0.7 * g(rng);
    const auto fa = StepCDF::from_atoms(a), fb = StepCDF::from_atoms(b);
    const double scan = levy_scan([&](double x) { return fa.cdf(x); }, [&](double x) { return fb.cdf(x); }, -6, 6, 5e-4);
    CHECK(std::abs(levy_distance(fa, fb) - scan) <= 2e-3);
    CHECK(levy_distance(fa, fb) <= sup_distance(fa, fb) + 1e-9);

    const double scan_g = levy_scan([&](double x) { return fa.cdf(x); }, [&](double x) { return law.cdf(x); }, -6, 6, 5e-4);
    CHECK(std::abs(levy_distance(fa, law) - scan_g) <= 2e-3);
    CHECK(levy_distance(fa, law) <= sup_distance(fa, law) + 1e-9);
  }
  const auto f = StepCDF::from_atoms(std::vector<double>{0.1, 0.2});
  CHECK(levy_distance(f, f) == 0.0);
}

TEST_CASE("rank and Levy perturbation bounds") {
  for (int n : {4, 16, 64}) {
    const auto s = scaled_matrix(sample_matrix(EntryLawSpec{}, n, derive_key(2, n)));
    auto t = s;
    t.set(0, n - 1, Quaterniond{3.0, -1.0, 0.5, 2.0});
    const auto a = expand_hermitian(s), b = expand_hermitian(t);
    const auto fa = esd(hermitian_eigenvalues(a)), fb = esd(hermitian_eigenvalues(b));
    CHECK(sup_distance(fa, fb) <= 4.0 / (2 * n));
    const double L = levy_distance(fa, fb);
    CHECK(L * L * L <= (a - b).squaredNorm() / (2 * n));
  }
}

TEST_CASE("averaged step CDF") {
  const std::vector<StepCDF> cdfs = {StepCDF::from_atoms(std::vector<double>{0.0, 1.0}),
                                     StepCDF::from_atoms(std::vector<double>{0.5, 1.0})};
  const auto avg = StepCDF::average(cdfs);
  CHECK(avg.cdf(0.0) == doctest::Approx(0.25));
  CHECK(avg.cdf(0.5) == doctest::Approx(0.5));
  CHECK(avg.cdf(1.0) == 1.0);
}

TEST_CASE("eigensolver recovers when the first QL pass stalls") {
  // this instance exhausts Eigen's iteration budget on the first attempt
  const auto h = expand_hermitian(scaled_matrix(sample_matrix(EntryLawSpec{}, 512, derive_key(20240601, 512, 66))));
  const auto s = hermitian_eigenvalues(h);
  CHECK(s.eigenvalues.size() == 1024);
  CHECK(std::abs(s.eigenvalues.sum() - h.trace().real()) <= 1e-9 * 1024);
}
