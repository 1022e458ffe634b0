#include "qrmt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "qrmt/rng.hpp"

namespace qrmt {

std::string to_string(Distance d) {
  switch (d) {
    case Distance::kolmogorov: return "kolmogorov";
    case Distance::levy: return "levy";
    case Distance::bai_bound: return "bai_bound";
  }
  return "?";
}

std::optional<double> SweepRow::get(Distance d) const {
  switch (d) {
    case Distance::kolmogorov: return kolmogorov;
    case Distance::levy: return levy;
    case Distance::bai_bound: return bai_bound;
  }
  return std::nullopt;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
}

namespace {

struct RowOutput {
  SweepRow row;
  StepCDF cdf;
};

RowOutput run_row(const SweepConfig& cfg, int n, int rep) {
  RowOutput out;
  SweepRow& row = out.row;
  row.ensemble = cfg.ensemble.tag();
  row.n = n;
  row.rep = rep;
  row.seed = derive_key(cfg.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
  const auto start = std::chrono::steady_clock::now();
  try {
    QSelfDualMatrixd y = sample_matrix(cfg.ensemble, n, row.seed);
    if (cfg.pipeline == Pipeline::truncated) y = truncate_standardize(cfg.ensemble, y).first;
    const auto spectrum = hermitian_eigenvalues(expand_hermitian(scaled_matrix(y)));
    // Off-diagonal entries have unit variance, so the limit is the standard semicircle.
    const SemicircleLaw law(1.0);
    out.cdf = esd(spectrum);
    row.kolmogorov = sup_distance(out.cdf, law);
    if (cfg.levy) row.levy = levy_distance(out.cdf, law);
    if (cfg.bai) {
      BaiBoundParams p = *cfg.bai;
      p.v = cfg.stieltjes_v.at(n);
      row.bai_bound = bai_bound(spectrum, law, p).bound;
    }
  } catch (const std::exception& e) {
    row.kolmogorov.reset();
    row.levy.reset();
    row.bai_bound.reset();
    row.error = e.what();
    out.cdf = StepCDF();
  }
  if (cfg.timing) {
    row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                         .count();
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const int per_n = config.reps;
  const int total = static_cast<int>(config.n_list.size()) * per_n;
  std::vector<RowOutput> outputs(static_cast<std::size_t>(total));
  parallel_for(total, config.threads, [&](int i) {
    outputs[static_cast<std::size_t>(i)] = run_row(config, config.n_list[static_cast<std::size_t>(i / per_n)], i % per_n);
  });

  SweepResult result;
  result.rows.reserve(outputs.size());
  for (const auto& o : outputs) result.rows.push_back(o.row);

  const SemicircleLaw law(1.0);
  for (std::size_t k = 0; k < config.n_list.size(); ++k) {
    std::vector<StepCDF> cdfs;
    for (int r = 0; r < per_n; ++r) {
      const auto& o = outputs[k * static_cast<std::size_t>(per_n) + static_cast<std::size_t>(r)];
      if (o.row.ok()) cdfs.push_back(o.cdf);
    }
    if (cdfs.empty()) continue;
    AggregateRow agg;
    agg.n = config.n_list[k];
    agg.reps = static_cast<int>(cdfs.size());
    const StepCDF mean = StepCDF::average(cdfs);
    agg.kolmogorov = sup_distance(mean, law);
    if (config.levy) agg.levy = levy_distance(mean, law);
    result.aggregates.push_back(agg);
  }
  return result;
}

RateFit fit_loglog(const std::vector<int>& n, const std::vector<double>& values) {
  if (n.size() != values.size()) throw InvalidParams("fit_loglog: size mismatch");
  std::vector<int> distinct = n;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw InsufficientData("rate fit needs at least 3 distinct n");

  const auto m = static_cast<double>(n.size());
  double sx = 0, sy = 0;
  std::vector<double> lx(n.size()), ly(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(values[i] > 0.0)) throw InsufficientData("rate fit needs positive distances (n = " + std::to_string(n[i]) + ")");
    lx[i] = std::log(static_cast<double>(n[i]));
    ly[i] = std::log(values[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    ssr += r * r;
  }
  fit.residual_std_error = n.size() > 2 ? std::sqrt(ssr / (m - 2.0)) : 0.0;
  fit.n = n;
  fit.mean = values;
  fit.std_error.assign(n.size(), 0.0);
  for (std::size_t i = 0; i < n.size(); ++i) {
    fit.bound_constant.push_back(values[i] * std::pow(static_cast<double>(n[i]), 0.4));
  }
  fit.max_bound_constant = *std::max_element(fit.bound_constant.begin(), fit.bound_constant.end());
  return fit;
}

DistanceSummary summarize(const std::vector<SweepRow>& rows, Distance distance) {
  std::map<int, std::vector<double>> by_n;
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    if (const auto v = r.get(distance)) by_n[r.n].push_back(*v);
  }
  DistanceSummary s;
  for (const auto& [n, vals] : by_n) {
    const auto m = static_cast<double>(vals.size());
    double sum = 0;
    for (double v : vals) sum += v;
    const double mean = sum / m;
    double ss = 0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    s.n.push_back(n);
    s.mean.push_back(mean);
    s.std_error.push_back(vals.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0);
  }
  return s;
}

RateFit fit_rate(const std::vector<SweepRow>& rows, Distance distance) {
  const DistanceSummary s = summarize(rows, distance);
  RateFit fit = fit_loglog(s.n, s.mean);
  fit.distance = distance;
  fit.std_error = s.std_error;
  return fit;
}

std::vector<Verdict> sweep_verdicts(const SweepResult& result, const SweepConfig& config) {
  std::vector<Verdict> out;
  auto fmt = [](double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
  };

  int failed = 0;
  bool in_range = true, bound_ok = true;
  for (const auto& r : result.rows) {
    if (!r.ok()) {
      ++failed;
      continue;
    }
    if (!(*r.kolmogorov >= 0.0 && *r.kolmogorov <= 1.0)) in_range = false;
    if (r.bai_bound && !(*r.bai_bound >= *r.kolmogorov)) bound_ok = false;
  }
  out.push_back({"rows_ok", failed == 0, std::to_string(failed) + " failed rows"});
  out.push_back({"kolmogorov_in_range", in_range, ""});
  if (config.bai) out.push_back({"bound_consistency", bound_ok, "bai_bound >= kolmogorov on every row"});

  // sup is convex, so the rep-averaged distance cannot exceed the mean distance
  bool agg_ok = true;
  for (const auto& a : result.aggregates) {
    double sum = 0;
    int count = 0;
    for (const auto& r : result.rows) {
      if (r.ok() && r.n == a.n) {
        sum += *r.kolmogorov;
        ++count;
      }
    }
    if (count > 0 && a.kolmogorov > sum / count + 1e-12) agg_ok = false;
  }
  out.push_back({"aggregation_consistency", agg_ok, ""});

  if (config.n_list.size() >= 3 && failed == 0) {
    const RateFit fit = fit_rate(result.rows, Distance::kolmogorov);
    out.push_back({"rate_slope", fit.slope <= -0.40 + 0.05, "slope " + fmt(fit.slope)});
    bool bounded = true;
    for (double c : fit.bound_constant) bounded = bounded && c <= 1.5 * fit.bound_constant.front();
    out.push_back({"bound_constant", bounded, "max C(n) " + fmt(fit.max_bound_constant)});
  }
  return out;
}

}  // namespace qrmt
