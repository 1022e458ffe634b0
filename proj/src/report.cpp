#include "qrmt/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace qrmt {

namespace {

using nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, int lineno) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidParams("csv line " + std::to_string(lineno) + ": bad field '" + text + "'");
  }
  return value;
}

std::optional<double> parse_optional(const std::string& text, int lineno) {
  if (text.empty()) return std::nullopt;
  return parse_field<double>(text, lineno);
}

ordered_json fit_to_json(const RateFit& f) {
  ordered_json j;
  j["distance"] = to_string(f.distance);
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["residual_std_error"] = f.residual_std_error;
  j["n"] = f.n;
  j["mean"] = f.mean;
  j["std_error"] = f.std_error;
  j["bound_constant"] = f.bound_constant;
  j["max_bound_constant"] = f.max_bound_constant;
  return j;
}

ordered_json config_to_json(const SweepConfig& c) {
  ordered_json j;
  j["ensemble"] = c.ensemble.tag();
  j["sigma"] = c.ensemble.sigma;
  if (c.ensemble.kind == EntryLaw::heavy_tail) j["tail_index"] = c.ensemble.tail_index;
  j["test_mode"] = c.ensemble.allow_degenerate;
  j["n_list"] = c.n_list;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["pipeline"] = c.pipeline == Pipeline::raw ? "raw" : "truncated";
  j["distances"] = c.levy ? std::vector<std::string>{"kolmogorov", "levy"} : std::vector<std::string>{"kolmogorov"};
  j["stieltjes_v"] = c.stieltjes_v.describe();
  if (c.bai) {
    j["bai"] = {{"A", c.bai->A}, {"B", c.bai->B}, {"a", c.bai->a}};
  } else {
    j["bai"] = nullptr;
  }
  j["timing"] = c.timing;
  return j;
}

}  // namespace

ReportPaths report_paths(const SweepConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  return {(dir / config.csv_name).string(), (dir / config.json_name).string(), (dir / config.tsv_name).string()};
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.ensemble << ',' << r.n << ',' << r.rep << ',' << r.seed << ',' << optional_field(r.kolmogorov) << ','
        << optional_field(r.levy) << ',' << optional_field(r.bai_bound) << ',' << r.runtime_ms << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidParams("csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw InvalidParams("unexpected csv header: " + line);
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 8) throw InvalidParams("csv line " + std::to_string(lineno) + ": expected 8 fields");
    SweepRow r;
    r.ensemble = f[0];
    r.n = parse_field<int>(f[1], lineno);
    r.rep = parse_field<int>(f[2], lineno);
    r.seed = parse_field<std::uint64_t>(f[3], lineno);
    r.kolmogorov = parse_optional(f[4], lineno);
    r.levy = parse_optional(f[5], lineno);
    r.bai_bound = parse_optional(f[6], lineno);
    r.runtime_ms = parse_field<std::int64_t>(f[7], lineno);
    if (!r.kolmogorov) r.error = "failed row";
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read " + path);
  return read_csv(in);
}

std::string fits_json(const std::vector<RateFit>& fits) {
  ordered_json j = ordered_json::array();
  for (const auto& f : fits) j.push_back(fit_to_json(f));
  return j.dump(2);
}

std::string summary_json(const SweepResult& result, const std::vector<RateFit>& fits, const SweepConfig& config,
                         const std::vector<Verdict>& verdicts) {
  ordered_json j;
  j["config"] = config_to_json(config);

  struct Acc {
    std::vector<double> k, l, b;
  };
  std::map<int, Acc> by_n;
  for (const auto& r : result.rows) {
    if (!r.ok()) continue;
    auto& a = by_n[r.n];
    a.k.push_back(*r.kolmogorov);
    if (r.levy) a.l.push_back(*r.levy);
    if (r.bai_bound) a.b.push_back(*r.bai_bound);
  }
  auto stats = [](const std::vector<double>& v) {
    ordered_json s;
    double sum = 0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    s["mean"] = mean;
    s["std_error"] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0.0;
    return s;
  };
  ordered_json per_n = ordered_json::array();
  for (const auto& [n, a] : by_n) {
    ordered_json e;
    e["n"] = n;
    e["count"] = a.k.size();
    e["kolmogorov"] = stats(a.k);
    if (!a.l.empty()) e["levy"] = stats(a.l);
    if (!a.b.empty()) e["bai_bound"] = stats(a.b);
    for (const auto& agg : result.aggregates) {
      if (agg.n != n) continue;
      e["expected_esd_kolmogorov"] = agg.kolmogorov;
      if (agg.levy) e["expected_esd_levy"] = *agg.levy;
    }
    per_n.push_back(e);
  }
  j["per_n"] = per_n;

  ordered_json jf = ordered_json::array();
  for (const auto& f : fits) jf.push_back(fit_to_json(f));
  j["fits"] = jf;

  ordered_json jv = ordered_json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    jv.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
    all = all && v.passed;
  }
  j["verdicts"] = jv;
  j["all_passed"] = all;

  ordered_json failures = ordered_json::array();
  for (const auto& r : result.rows) {
    if (!r.ok()) failures.push_back({{"n", r.n}, {"rep", r.rep}, {"seed", r.seed}, {"error", r.error}});
  }
  j["failures"] = failures;
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoFailure("write failed for " + path);
}

void emit_report(const SweepResult& result, const std::vector<RateFit>& fits, const SweepConfig& config,
                 const std::vector<Verdict>& verdicts, const ReportPaths& paths) {
  std::ostringstream csv;
  write_csv(csv, result.rows);
  write_text_file(paths.csv, csv.str());

  write_text_file(paths.json, summary_json(result, fits, config, verdicts) + "\n");

  std::ostringstream tsv;
  tsv << "distance\tn\tlog_n\tlog_mean_distance\n";
  auto line = [&](const std::string& name, int n, double value) {
    tsv << name << '\t' << n << '\t' << format_double(std::log(static_cast<double>(n))) << '\t'
        << format_double(std::log(value)) << '\n';
  };
  for (const Distance d : {Distance::kolmogorov, Distance::levy, Distance::bai_bound}) {
    const DistanceSummary s = summarize(result.rows, d);
    for (std::size_t i = 0; i < s.n.size(); ++i) line(to_string(d), s.n[i], s.mean[i]);
  }
  for (const auto& a : result.aggregates) line("expected_esd_kolmogorov", a.n, a.kolmogorov);
  write_text_file(paths.tsv, tsv.str());
}

}  // namespace qrmt
