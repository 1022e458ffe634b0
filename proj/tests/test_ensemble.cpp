#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "qrmt/ensemble.hpp"
#include "qrmt/rng.hpp"
#include "qrmt/spectra.hpp"

using namespace qrmt;

namespace {

EntryLawSpec law(EntryLaw kind) {
  EntryLawSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("entry law validation") {
  EntryLawSpec heavy = law(EntryLaw::heavy_tail);
  heavy.tail_index = 6.0;
  CHECK_THROWS_AS(heavy.validate(), InvalidSpec);
  heavy.tail_index = 7.0;
  CHECK_NOTHROW(heavy.validate());
  CHECK_THROWS_AS(law(EntryLaw::degenerate).validate(), InvalidSpec);
  EntryLawSpec neg;
  neg.sigma = -1.0;
  CHECK_THROWS_AS(neg.validate(), InvalidSpec);
  CHECK(parse_entry_law("bounded-discrete") == EntryLaw::bounded_discrete);
  CHECK_THROWS_AS(parse_entry_law("goe"), InvalidSpec);
}

TEST_CASE("sampling is deterministic and self-dual") {
  const auto a = sample_matrix(EntryLawSpec{}, 2, 42);
  const auto b = sample_matrix(EntryLawSpec{}, 2, 42);
  CHECK(a == b);
  CHECK_FALSE(a == sample_matrix(EntryLawSpec{}, 2, 43));
  CHECK(a(0, 0).is_scalar());
  CHECK(a(1, 0) == qconj(a(0, 1)));

  const auto h = expand_hermitian(sample_matrix(EntryLawSpec{}, 3, 7));
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bounded-discrete entries have unit norm") {
  const auto y = sample_matrix(law(EntryLaw::bounded_discrete), 12, 3);
  for (int j = 0; j < 12; ++j) {
    CHECK(std::abs(y.diagonal(j)) == 1.0);
    for (int k = j + 1; k < 12; ++k) CHECK(qnorm(y(j, k)) == 1.0);
  }
}

TEST_CASE("gse second moment, Monte Carlo") {
  const int n = 200, reps = 50;
  double sum = 0, sum_sq = 0;
  long count = 0;
  for (int r = 0; r < reps; ++r) {
    const auto y = sample_matrix(EntryLawSpec{}, n, derive_key(9, r));
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const double x = qnorm_squared(y(j, k));
        sum += x;
        sum_sq += x * x;
        ++count;
      }
    }
  }
  const double mean = sum / count;
  const double se = std::sqrt((sum_sq / count - mean * mean) / count);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("heavy-tail second moment and sixth moment constant") {
  EntryLawSpec heavy = law(EntryLaw::heavy_tail);
  // |y|^2 = s^2 sum P_i^2 with s^2 = 5/28; E (sum P^2)^3 = 211.456 for alpha = 7
  CHECK(heavy.offdiag_sixth_moment() == doctest::Approx(std::pow(5.0 / 28.0, 3) * 211.456).epsilon(1e-12));
  CHECK(EntryLawSpec{}.offdiag_sixth_moment() == doctest::Approx(3.0));

  const int n = 300;
  double sum = 0;
  long count = 0;
  const auto y = sample_matrix(heavy, n, 17);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      sum += qnorm_squared(y(j, k));
      ++count;
    }
  }
  // E|y|^4 is finite, so the sample mean concentrates at rate 1/sqrt(count)
  CHECK(sum / count == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("scaled_matrix") {
  QSelfDualMatrixd y(4);
  y.set(0, 1, Quaterniond{2, 0, 0, 0});
  const auto s = scaled_matrix(y);
  CHECK(s(0, 1) == Quaterniond{1, 0, 0, 0});
  CHECK(s.scaled());
  CHECK_THROWS_AS(scaled_matrix(s), AlreadyScaled);
  const auto z = scaled_matrix(QSelfDualMatrixd(3));
  CHECK(z == scaled_matrix(QSelfDualMatrixd(3)));
  CHECK(qnorm(z(0, 2)) == 0.0);
}

TEST_CASE("diagonal must stay scalar") {
  QSelfDualMatrixd y(2);
  CHECK_THROWS_AS(y.set(1, 1, Quaterniond::i1()), StructureViolation);
}

TEST_CASE("gse truncated variance against the incomplete gamma function") {
  for (int n : {1, 2, 16, 64}) {
    const auto m = truncated_moments(EntryLawSpec{}, n);
    const double tau = std::pow(n, 0.25);
    // 4|y|^2 ~ chi^2_4, so E|y|^2 I(|y| <= tau) = P(chi^2_6 <= 4 tau^2)
    const double off = boost::math::gamma_p(3.0, 2.0 * tau * tau);
    // y_jj ~ N(0, 1): E y^2 I(|y| <= tau) = P(chi^2_3 <= tau^2)
    const double diag = boost::math::gamma_p(1.5, 0.5 * tau * tau);
    CHECK(m.sigma_offdiag * m.sigma_offdiag == doctest::Approx(off).epsilon(1e-10));
    CHECK(m.sigma_diag * m.sigma_diag == doctest::Approx(diag).epsilon(1e-10));
  }
}

TEST_CASE("heavy-tail truncated variance against Monte Carlo") {
  EntryLawSpec heavy = law(EntryLaw::heavy_tail);
  const int n = 1;  // threshold 1 cuts deep into the law
  const auto m = truncated_moments(heavy, n);
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s2 = 5.0 / 28.0;
  const int draws = 2000000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < draws; ++i) {
    double sq = 0;
    for (int c = 0; c < 4; ++c) sq += std::pow(1.0 - u(rng), -2.0 / 7.0);
    const double norm2 = s2 * sq;
    const double x = norm2 <= 1.0 ? norm2 : 0.0;
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(m.sigma_offdiag * m.sigma_offdiag - mean) <= 4.0 * se);
}

TEST_CASE("truncation inactive for bounded-discrete") {
  const auto spec = law(EntryLaw::bounded_discrete);
  const auto y = sample_matrix(spec, 16, 5);
  const auto [w, report] = truncate_standardize(spec, y);
  CHECK(report.count_truncated == 0);
  CHECK(w == y);
}

TEST_CASE("truncated gse entries obey the triangle bound") {
  const int n = 64;
  const auto y = sample_matrix(EntryLawSpec{}, n, 8);
  const auto [w, report] = truncate_standardize(EntryLawSpec{}, y);
  const double tau = std::pow(n, 0.25);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) CHECK(qnorm(w(j, k)) <= 2.0 * tau / report.sigma_offdiag);
  }
  CHECK_THROWS_AS(truncate_standardize(EntryLawSpec{}, scaled_matrix(y)), AlreadyScaled);
}

TEST_CASE("heavy-tail truncation count obeys the Markov bound on average") {
  EntryLawSpec heavy = law(EntryLaw::heavy_tail);
  const int n = 256, reps = 10;
  double total = 0;
  for (int r = 0; r < reps; ++r) total += truncation_stages(heavy, sample_matrix(heavy, n, derive_key(31, r))).report.count_truncated;
  const double M = std::max(heavy.offdiag_sixth_moment(), heavy.diag_third_moment());
  CHECK(total / reps / (double(n) * n) <= M * std::pow(n, -1.5));
}

TEST_CASE("degenerate variance guard") {
  EntryLawSpec zero = law(EntryLaw::degenerate);
  zero.allow_degenerate = true;
  const auto y = sample_matrix(zero, 4, 1);
  CHECK_THROWS_AS(truncate_standardize(zero, y), DegenerateVariance);
}
