#include <cmath>
#include <complex>
#include <random>

#include <Eigen/LU>

#include "doctest.h"
#include "qrmt/ensemble.hpp"
#include "qrmt/resolvent.hpp"
#include "qrmt/rng.hpp"
#include "qrmt/spectra.hpp"
#include "qrmt/stieltjes.hpp"

using namespace qrmt;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd gse_expansion(int n, std::uint64_t seed) {
  return expand_hermitian(scaled_matrix(sample_matrix(EntryLawSpec{}, n, seed)));
}

Eigen::MatrixXcd random_type2(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const cd t(g(rng), g(rng));
    m(2 * j, 2 * j) = m(2 * j + 1, 2 * j + 1) = t;
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

}  // namespace

TEST_CASE("resolvent of small matrices") {
  const ComplexPoint i(0.0, 1.0);
  const auto r0 = resolvent(Eigen::MatrixXcd::Zero(2, 2), i);
  CHECK((r0.D - cd(0, 1) * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  const auto r1 = resolvent(Eigen::MatrixXcd::Identity(2, 2), i);
  CHECK((r1.D - (1.0 / cd(1, -1)) * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(r1.residual <= 1e-15);
}

TEST_CASE("trace of the resolvent matches the eigenvalue form") {
  const auto w = gse_expansion(30, 4);
  const ComplexPoint z(0.3, 0.2);
  const auto r = resolvent(w, z);
  const auto s = hermitian_eigenvalues(w);
  CHECK(std::abs(r.D.trace() / 60.0 - empirical_stieltjes(s, z)) <= 1e-10);
  CHECK(r.residual <= 1e-10);
}

TEST_CASE("minor resolvent") {
  Eigen::MatrixXcd one = 2.0 * Eigen::MatrixXcd::Identity(2, 2);
  const auto c1 = minor_resolvent(one, 0, {0.0, 1.0});
  CHECK(c1.D_k.size() == 0);
  CHECK(c1.trace_D_k == cd(0, 0));

  // diagonal W: removing block k leaves the other diagonal entries
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(6, 6);
  d.diagonal() << 1, 1, 2, 2, 3, 3;
  const ComplexPoint z(0.0, 0.5);
  const auto c = minor_resolvent(d, 1, z);
  CHECK(c.D_k.rows() == 4);
  CHECK(std::abs(c.D_k(2, 2) - 1.0 / (3.0 - z.z())) <= 1e-15);
  CHECK(c.q.cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.P_k - c.D_k * c.D_k).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(quaternion_minor(d, 1).diagonal() == Eigen::Vector4cd(1, 1, 3, 3));

  CHECK_THROWS_AS(minor_resolvent(d, 3, z), IndexOutOfRange);
  CHECK_THROWS_AS(minor_resolvent(d, -1, z), IndexOutOfRange);
  CHECK_THROWS_AS(minor_resolvent(Eigen::MatrixXcd::Zero(3, 3), 0, z), OddDimension);
}

TEST_CASE("trace interlacing") {
  const int n = 16;
  const auto w = gse_expansion(n, 8);
  for (double u : {-2.5, -1.0, 0.0, 0.7, 2.1}) {
    const ComplexPoint z(u, 0.3);
    for (int k = 0; k < n; ++k) {
      const auto c = minor_resolvent(w, k, z);
      CHECK(std::abs(c.trace_D - c.trace_D_k) <= 2.0 / z.v + 1e-12);
    }
  }
}

TEST_CASE("eps_k of the zero matrix") {
  const int n = 3;
  const ComplexPoint z(0.4, 0.6);
  const auto c = minor_resolvent(Eigen::MatrixXcd::Zero(2 * n, 2 * n), 1, z);
  const cd s = semicircle_stieltjes(z);
  const auto e = epsilon_k(c, Quaterniond{}, s, n);
  CHECK((e.value - s * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(e.scalar_deviation <= 1e-15);
  CHECK(std::abs(e.t_n - 1.0 / (z.z() + s)) <= 1e-15);
}

TEST_CASE("eps_k is scalar for a self-dual matrix") {
  const int n = 32;
  const auto y = sample_matrix(EntryLawSpec{}, n, 21);
  const auto w = expand_hermitian(scaled_matrix(y));
  const ComplexPoint z(0.5, 0.3);
  const cd esn = resolvent(w, z).D.trace() / (2.0 * n);
  for (int k : {0, 7, 31}) {
    const auto c = minor_resolvent(w, k, z);
    const auto e = epsilon_k(c, y(k, k), esn, n);
    CHECK(e.scalar_deviation <= 1e-10);
    // xi = t I + t xi eps, from xi^{-1} = (z + E s_n) I - eps
    const Eigen::Matrix2cd rhs = e.t_n * Eigen::Matrix2cd::Identity() + e.t_n * e.xi * e.value;
    CHECK((e.xi - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(imaginary_part_margin(c) < 0.0);
  }
}

TEST_CASE("delta from minors and from the full resolvent agree") {
  const int n = 12;
  const auto w = gse_expansion(n, 13);
  const ComplexPoint z(-0.4, 0.25);
  const cd esn = resolvent(w, z).D.trace() / (2.0 * n);
  const cd a = delta_from_minors(w, z, esn);
  const cd b = delta_from_resolvent(w, z, esn);
  CHECK(std::abs(a - b) <= 1e-10);
}

TEST_CASE("structural classifiers") {
  std::mt19937_64 rng(3);
  const auto t2 = random_type2(5, rng);
  CHECK(is_type2(t2, 1e-14));
  CHECK(is_type1(t2, 1e-14));

  // Type-I but not Type-II: the upper block is not of quaternion form
  Eigen::MatrixXcd t1 = Eigen::MatrixXcd::Zero(4, 4);
  t1.block<2, 2>(0, 2) << 1.0, 2.0, 3.0, 4.0;
  t1.block<2, 2>(2, 0) << 4.0, -2.0, -3.0, 1.0;
  CHECK(is_type1(t1, 1e-14));
  CHECK_FALSE(is_type2(t1, 1e-14));

  Eigen::MatrixXcd off = Eigen::MatrixXcd::Identity(4, 4);
  off(0, 0) = 2.0;
  CHECK_FALSE(is_type1(off, 1e-14));
  CHECK_THROWS_AS(is_type1(Eigen::MatrixXcd::Zero(3, 3), 1e-14), OddDimension);

  // the Hermitian expansion of a self-dual matrix is Type-II
  CHECK(is_type2(gse_expansion(6, 1), 1e-14));
}

TEST_CASE("inverse of a Type-II matrix is Type-I") {
  const auto three = verify_inverse_type1(3.0 * Eigen::MatrixXcd::Identity(4, 4), 1e-12);
  CHECK((three.inverse - Eigen::MatrixXcd::Identity(4, 4) / 3.0).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(three.is_type1);

  Eigen::MatrixXcd w = gse_expansion(20, 5);
  w.diagonal().array() -= cd(0.7, 0.5);
  const auto g = verify_inverse_type1(w, 1e-12);
  CHECK(g.is_type1);
  CHECK(g.structural_residual <= 1e-10);

  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_type2(6, rng);
    const auto r = verify_inverse_type1(m, 1e-12);
    CHECK(r.structural_residual <= 1e-10 * std::max(1.0, r.inverse.cwiseAbs().maxCoeff()));
  }

  Eigen::MatrixXcd singular = Eigen::MatrixXcd::Identity(4, 4);
  singular(2, 2) = singular(3, 3) = 0.0;
  CHECK_THROWS_AS(verify_inverse_type1(singular, 1e-12), NumericallySingular);

  Eigen::MatrixXcd not_t2 = Eigen::MatrixXcd::Identity(4, 4);
  not_t2(0, 2) = 1.0;
  not_t2(1, 3) = 2.0;
  CHECK_THROWS_AS(verify_inverse_type1(not_t2, 1e-12), StructureViolation);
}

TEST_CASE("partitioned inverse") {
  Eigen::MatrixXcd bd = Eigen::MatrixXcd::Zero(4, 4);
  bd.block<2, 2>(0, 0) << 2.0, 0.0, 0.0, 4.0;
  bd.block<2, 2>(2, 2) << 1.0, 1.0, 0.0, 1.0;
  const auto b = block_inverse(bd, 2);
  CHECK(b.top_right.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.bottom_left.cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(b.top_left(1, 1) - 0.25) <= 1e-15);
  CHECK(std::abs(b.bottom_right(0, 1) + 1.0) <= 1e-15);

  // 2x2 with 1x1 blocks is the adjugate formula
  Eigen::MatrixXcd m2(2, 2);
  m2 << 1.0, 2.0, 3.0, 4.0;
  Eigen::MatrixXcd adj(2, 2);
  adj << 4.0, -2.0, -3.0, 1.0;
  CHECK((block_inverse(m2, 1).assemble() - adj / -2.0).cwiseAbs().maxCoeff() <= 1e-14);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd r(10, 10);
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = cd(g(rng), g(rng));
  const Eigen::MatrixXcd dense = r.inverse();
  CHECK((block_inverse(r, 6).assemble() - dense).cwiseAbs().maxCoeff() <= 1e-10 * dense.cwiseAbs().maxCoeff());

  Eigen::MatrixXcd sing = Eigen::MatrixXcd::Identity(4, 4);
  sing(0, 0) = 0.0;
  CHECK_THROWS_AS(block_inverse(sing, 2), SingularBlock);
  CHECK_THROWS_AS(block_inverse(r, 0), IndexOutOfRange);
  CHECK_THROWS_AS(block_inverse(r, 10), IndexOutOfRange);
}
