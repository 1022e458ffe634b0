#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "qrmt/ensemble.hpp"
#include "qrmt/spectra.hpp"
#include "qrmt/stieltjes.hpp"

namespace qrmt {

enum class Pipeline { raw, truncated };

enum class Distance { kolmogorov, levy, bai_bound };

std::string to_string(Distance d);

/// v used for the Stieltjes transform at dimension n.
struct StieltjesRule {
  enum class Kind { constant, inv_sqrt, inv_two_fifths };
  Kind kind = Kind::inv_sqrt;
  double scale = 1.0;

  double at(int n) const;
  std::string describe() const;
};

struct SweepConfig {
  EntryLawSpec ensemble;
  std::vector<int> n_list;
  int reps = 1;
  std::uint64_t seed = 0;
  Pipeline pipeline = Pipeline::raw;
  bool levy = false;  ///< the Kolmogorov distance is always measured
  StieltjesRule stieltjes_v;
  std::optional<BaiBoundParams> bai;  ///< v is taken from stieltjes_v per n
  std::string output_dir = ".";
  std::string csv_name = "sweep.csv";
  std::string json_name = "summary.json";
  std::string tsv_name = "rates.tsv";
  bool timing = true;
  int threads = 0;  ///< 0 = hardware concurrency

  /// Throws ConfigError.
  void validate() const;
};

/// Flat "key = value" text, one per line, '#' starts a comment. Throws ConfigError.
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

struct SweepRow {
  std::string ensemble;
  int n = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  std::optional<double> kolmogorov;
  std::optional<double> levy;
  std::optional<double> bai_bound;
  std::int64_t runtime_ms = 0;
  std::string error;  ///< non-empty on a failed row

  bool ok() const { return error.empty(); }
  std::optional<double> get(Distance d) const;
};

/// Distances of the rep-averaged ESD for one n.
struct AggregateRow {
  int n = 0;
  int reps = 0;
  double kolmogorov = 0.0;
  std::optional<double> levy;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< ordered by (n, rep)
  std::vector<AggregateRow> aggregates;
};

/// Per-row seed derive_key(seed, n, rep); the output does not depend on scheduling.
/// Row failures are recorded, never thrown.
SweepResult run_sweep(const SweepConfig& config);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

struct RateFit {
  Distance distance = Distance::kolmogorov;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_std_error = 0.0;
  std::vector<int> n;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> bound_constant;  ///< mean * n^{2/5}
  double max_bound_constant = 0.0;
};

/// Per-n mean and standard error of one distance over the successful rows.
struct DistanceSummary {
  std::vector<int> n;
  std::vector<double> mean;
  std::vector<double> std_error;
};

DistanceSummary summarize(const std::vector<SweepRow>& rows, Distance distance);

/// OLS of log(mean) on log(n). Throws InsufficientData below 3 distinct n.
RateFit fit_rate(const std::vector<SweepRow>& rows, Distance distance);

/// Same fit for already aggregated (n, value) pairs.
RateFit fit_loglog(const std::vector<int>& n, const std::vector<double>& values);

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property checks on a finished sweep; rate checks appear only with >= 3 distinct n.
std::vector<Verdict> sweep_verdicts(const SweepResult& result, const SweepConfig& config);

}  // namespace qrmt
