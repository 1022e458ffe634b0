#include "qrmt/ensemble.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <tuple>

#include "qrmt/quadrature.hpp"
#include "qrmt/rng.hpp"

namespace qrmt {

namespace {

// Heavy-tail components are s * (+-1) * P with P Pareto(x_m = 1, alpha), so
// E P^2 = alpha / (alpha - 2). Four components with E|y|^2 = 1 need 4 s^2 E P^2 = 1.
double heavy_offdiag_scale(double alpha) { return std::sqrt((alpha - 2.0) / (4.0 * alpha)); }
double heavy_diag_scale(double alpha, double sigma) {
  return sigma * std::sqrt((alpha - 2.0) / alpha);
}

double pareto_moment(double alpha, double k) { return alpha / (alpha - k); }

}  // namespace

void EntryLawSpec::validate() const {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidSpec("sigma must be finite and >= 0");
  switch (kind) {
    case EntryLaw::heavy_tail:
      if (!std::isfinite(tail_index) || tail_index <= 6.0) {
        throw InvalidSpec("heavy-tail index must exceed 6 for a finite sixth moment (got " +
                          std::to_string(tail_index) + ")");
      }
      break;
    case EntryLaw::degenerate:
      if (!allow_degenerate) {
        throw InvalidSpec("degenerate law violates E|y|^2 = 1; enable test mode to use it");
      }
      break;
    default:
      break;
  }
}

std::string to_string(EntryLaw law) {
  switch (law) {
    case EntryLaw::gse: return "gse";
    case EntryLaw::bounded_discrete: return "bounded-discrete";
    case EntryLaw::heavy_tail: return "heavy-tail";
    case EntryLaw::degenerate: return "degenerate";
  }
  return "unknown";
}

EntryLaw parse_entry_law(const std::string& name) {
  if (name == "gse") return EntryLaw::gse;
  if (name == "bounded-discrete") return EntryLaw::bounded_discrete;
  if (name == "heavy-tail") return EntryLaw::heavy_tail;
  if (name == "degenerate") return EntryLaw::degenerate;
  throw InvalidSpec("unknown entry law '" + name + "'");
}

std::string EntryLawSpec::tag() const { return to_string(kind); }

double EntryLawSpec::offdiag_sixth_moment() const {
  switch (kind) {
    case EntryLaw::gse:
      // |y|^2 = X / 4 with X ~ chi^2_4, E X^3 = 4 * 6 * 8
      return 192.0 / 64.0;
    case EntryLaw::bounded_discrete:
      return 1.0;
    case EntryLaw::heavy_tail: {
      // |y|^2 = s^2 (U1 + ... + U4), U = P^2; expand E (sum U)^3 over index patterns.
      const double s = heavy_offdiag_scale(tail_index);
      const double m1 = pareto_moment(tail_index, 2), m2 = pareto_moment(tail_index, 4),
                   m3 = pareto_moment(tail_index, 6);
      const double sum3 = 4 * m3 + 3 * 12 * m2 * m1 + 24 * m1 * m1 * m1;
      return std::pow(s, 6) * sum3;
    }
    case EntryLaw::degenerate:
      return 0.0;
  }
  return 0.0;
}

double EntryLawSpec::diag_third_moment() const {
  switch (kind) {
    case EntryLaw::gse: return sigma * sigma * sigma * 2.0 * std::sqrt(2.0 / M_PI);
    case EntryLaw::bounded_discrete: return sigma * sigma * sigma;
    case EntryLaw::heavy_tail:
      return std::pow(heavy_diag_scale(tail_index, sigma), 3) * pareto_moment(tail_index, 3);
    case EntryLaw::degenerate: return 0.0;
  }
  return 0.0;
}

namespace {

Quaterniond draw_offdiag(const EntryLawSpec& spec, CounterStream& rng) {
  switch (spec.kind) {
    case EntryLaw::gse: {
      std::normal_distribution<double> normal(0.0, 0.5);
      const double a = normal(rng), b = normal(rng), c = normal(rng), d = normal(rng);
      return {a, b, c, d};
    }
    case EntryLaw::bounded_discrete: {
      const std::uint64_t bits = rng();
      auto pm = [bits](int i) { return ((bits >> i) & 1U) ? 0.5 : -0.5; };
      return {pm(0), pm(1), pm(2), pm(3)};
    }
    case EntryLaw::heavy_tail: {
      const double s = heavy_offdiag_scale(spec.tail_index);
      auto component = [&] {
        const double p = std::pow(rng.uniform_open0(), -1.0 / spec.tail_index);
        return (rng() & 1U) ? s * p : -s * p;
      };
      const double a = component(), b = component(), c = component(), d = component();
      return {a, b, c, d};
    }
    case EntryLaw::degenerate:
      return {};
  }
  return {};
}

double draw_diag(const EntryLawSpec& spec, CounterStream& rng) {
  switch (spec.kind) {
    case EntryLaw::gse: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return spec.sigma * normal(rng);
    }
    case EntryLaw::bounded_discrete:
      return (rng() & 1U) ? spec.sigma : -spec.sigma;
    case EntryLaw::heavy_tail: {
      const double p = std::pow(rng.uniform_open0(), -1.0 / spec.tail_index);
      const double s = heavy_diag_scale(spec.tail_index, spec.sigma);
      return (rng() & 1U) ? s * p : -s * p;
    }
    case EntryLaw::degenerate:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

QSelfDualMatrixd sample_matrix(const EntryLawSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw InvalidSpec("n must be >= 1");
  QSelfDualMatrixd y(n);
  for (int j = 0; j < n; ++j) {
    CounterStream diag_rng(derive_key(seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(j)));
    y.set_diagonal(j, draw_diag(spec, diag_rng));
    for (int k = j + 1; k < n; ++k) {
      CounterStream rng(derive_key(seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(k)));
      y.set(j, k, draw_offdiag(spec, rng));
    }
  }
  return y;
}

QSelfDualMatrixd scaled_matrix(const QSelfDualMatrixd& y) {
  if (y.scaled()) throw AlreadyScaled("matrix is already scaled by 1/sqrt(n)");
  QSelfDualMatrixd s = y;
  const double f = 1.0 / std::sqrt(static_cast<double>(y.size()));
  s.transform_entries([f](const Quaterniond& q) { return f * q; });
  s.set_scaled(true);
  return s;
}

namespace {

struct TruncatedSecondMoments {
  double offdiag = 1.0;  // E|y|^2 I(|y| <= tau)
  double diag = 1.0;
};

// P(U1 + ... + Um <= x) for i.i.d. U with density (alpha/2) u^{-alpha/2 - 1} on [1, inf).
double pareto_square_sum_cdf(int m, double x, double alpha) {
  const double h = 0.5 * alpha;
  if (x <= m) return 0.0;
  if (m == 1) return 1.0 - std::pow(x, -h);
  auto integrand = [&](double u) {
    return h * std::pow(u, -h - 1.0) * pareto_square_sum_cdf(m - 1, x - u, alpha);
  };
  return integrate(integrand, 1.0, x - (m - 1), 1e-15, 1e-13).value;
}

TruncatedSecondMoments compute_truncated_second_moments(const EntryLawSpec& spec, double tau) {
  TruncatedSecondMoments out;
  const double sigma = spec.sigma;
  switch (spec.kind) {
    case EntryLaw::gse: {
      // |y|^2 = X / 4, X ~ chi^2_4 with density x e^{-x/2} / 4.
      const double upper = 4.0 * tau * tau;
      out.offdiag = integrate([](double x) { return 0.25 * x * x * std::exp(-0.5 * x) / 4.0; },
                              0.0, upper, 1e-15, 1e-13)
                        .value;
      if (sigma > 0.0) {
        const double t = tau / sigma;
        const double std_part =
            integrate([](double u) { return 2.0 * u * u * std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); },
                      0.0, t, 1e-15, 1e-13)
                .value;
        out.diag = sigma * sigma * std_part;
      } else {
        out.diag = 0.0;
      }
      break;
    }
    case EntryLaw::bounded_discrete:
      out.offdiag = (1.0 <= tau) ? 1.0 : 0.0;
      out.diag = (sigma <= tau) ? sigma * sigma : 0.0;
      break;
    case EntryLaw::heavy_tail: {
      const double alpha = spec.tail_index;
      const double s = heavy_offdiag_scale(alpha);
      const double c = tau * tau / (s * s);
      const double h = 0.5 * alpha;
      // E[S; S <= c] = 4 E[U1; U1 + (U2+U3+U4) <= c]
      double partial = 0.0;
      if (c > 4.0) {
        partial = 4.0 * integrate(
                            [&](double u) {
                              return u * h * std::pow(u, -h - 1.0) *
                                     pareto_square_sum_cdf(3, c - u, alpha);
                            },
                            1.0, c - 3.0, 1e-14, 1e-12)
                            .value;
      }
      out.offdiag = s * s * partial;
      const double sd = heavy_diag_scale(alpha, sigma);
      if (sd > 0.0 && tau > sd) {
        out.diag = sd * sd *
                   integrate([&](double p) { return p * p * alpha * std::pow(p, -alpha - 1.0); }, 1.0,
                             tau / sd, 1e-15, 1e-13)
                       .value;
      } else {
        out.diag = 0.0;
      }
      break;
    }
    case EntryLaw::degenerate:
      out.offdiag = 0.0;
      out.diag = 0.0;
      break;
  }
  return out;
}

}  // namespace

TruncatedMoments truncated_moments(const EntryLawSpec& spec, int n) {
  spec.validate();
  using Key = std::tuple<int, double, double, int>;
  static std::mutex mutex;
  static std::map<Key, TruncatedMoments> cache;
  const Key key{static_cast<int>(spec.kind), spec.sigma, spec.tail_index, n};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  TruncatedMoments m;
  m.threshold = std::pow(static_cast<double>(n), 0.25);
  const auto second = compute_truncated_second_moments(spec, m.threshold);
  // Every supported law is invariant under y -> -y, so the truncated means vanish and the
  // truncated variance equals the truncated second moment.
  m.mean_offdiag = Quaterniond{};
  m.mean_diag = 0.0;
  m.sigma_offdiag = std::sqrt(second.offdiag);
  m.sigma_diag = std::sqrt(second.diag);
  std::lock_guard lock(mutex);
  cache.emplace(key, m);
  return m;
}

TruncationStages truncation_stages(const EntryLawSpec& spec, const QSelfDualMatrixd& y) {
  if (y.scaled()) throw AlreadyScaled("truncation expects the unscaled matrix Y_n");
  const int n = y.size();
  const TruncatedMoments m = truncated_moments(spec, n);

  TruncationReport report;
  report.threshold = m.threshold;
  report.sigma_offdiag = m.sigma_offdiag;
  report.sigma_diag = m.sigma_diag;
  const bool diag_guard = spec.sigma > 0.0 && m.sigma_diag < kVarianceGuard * spec.sigma;
  report.below_guard = m.sigma_offdiag < kVarianceGuard || diag_guard;

  QSelfDualMatrixd tilde(n), hat(n), w(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const Quaterniond q = y(j, k);
      const bool keep = qnorm(q) <= m.threshold;
      if (!keep) {
        ++report.count_truncated;
        if (j == k) ++report.count_diag; else ++report.count_offdiag;
      }
      const Quaterniond t = keep ? q : Quaterniond{};
      tilde.set(j, k, t);
      if (j == k) {
        const double centered = t.a - m.mean_diag;
        hat.set_diagonal(j, centered);
        // sigma = 0 forces y_jj = 0 almost surely; the standardized entry is 0 as well.
        w.set_diagonal(j, spec.sigma > 0.0 && m.sigma_diag > 0.0 ? spec.sigma / m.sigma_diag * centered : 0.0);
      } else {
        const Quaterniond centered = t - m.mean_offdiag;
        hat.set(j, k, centered);
        w.set(j, k, m.sigma_offdiag > 0.0 ? (1.0 / m.sigma_offdiag) * centered : Quaterniond{});
      }
    }
  }
  return {std::move(tilde), std::move(hat), std::move(w), report};
}

std::pair<QSelfDualMatrixd, TruncationReport> truncate_standardize(const EntryLawSpec& spec,
                                                                  const QSelfDualMatrixd& y) {
  auto stages = truncation_stages(spec, y);
  if (stages.report.below_guard) {
    throw DegenerateVariance("truncated standard deviation below guard (offdiag " +
                             std::to_string(stages.report.sigma_offdiag) + ", diag " +
                             std::to_string(stages.report.sigma_diag) + ")");
  }
  return {std::move(stages.w), stages.report};
}

}  // namespace qrmt
