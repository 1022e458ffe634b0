// Command line front end: sweep, rate, verify, bound.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qrmt/errors.hpp"
#include "qrmt/experiment.hpp"
#include "qrmt/report.hpp"
#include "qrmt/verify.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

qrmt::SweepConfig load_with_env(const std::string& path) {
  qrmt::SweepConfig cfg = qrmt::load_config(path);
  if (const char* dir = std::getenv("QRMT_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
  return cfg;
}

std::vector<qrmt::RateFit> available_fits(const std::vector<qrmt::SweepRow>& rows) {
  std::vector<qrmt::RateFit> fits;
  for (const auto d : {qrmt::Distance::kolmogorov, qrmt::Distance::levy, qrmt::Distance::bai_bound}) {
    try {
      fits.push_back(qrmt::fit_rate(rows, d));
    } catch (const qrmt::InsufficientData&) {
    }
  }
  return fits;
}

int report_verdicts(const std::vector<qrmt::Verdict>& verdicts) {
  bool all = true;
  for (const auto& v : verdicts) {
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.name;
    if (!v.detail.empty()) std::cout << ": " << v.detail;
    std::cout << '\n';
    all = all && v.passed;
  }
  return all ? kExitPass : kExitNumerical;
}

int cmd_sweep(const std::string& config_path, bool force_bai) {
  qrmt::SweepConfig cfg = load_with_env(config_path);
  if (force_bai && !cfg.bai) {
    cfg.bai = qrmt::BaiBoundParams{};
    cfg.validate();
  }
  const auto result = qrmt::run_sweep(cfg);
  const auto fits = available_fits(result.rows);
  const auto verdicts = qrmt::sweep_verdicts(result, cfg);
  const auto paths = qrmt::report_paths(cfg);
  qrmt::emit_report(result, fits, cfg, verdicts, paths);
  std::cout << "wrote " << paths.csv << ", " << paths.json << ", " << paths.tsv << '\n';
  if (force_bai) {
    for (const auto& r : result.rows) {
      if (!r.ok()) continue;
      std::cout << "n=" << r.n << " rep=" << r.rep << " kolmogorov=" << *r.kolmogorov << " bound=" << *r.bai_bound
                << (*r.bai_bound >= *r.kolmogorov ? "" : "  VIOLATED") << '\n';
    }
  }
  return report_verdicts(verdicts);
}

int cmd_rate(const std::string& input, const std::string& out) {
  const auto rows = qrmt::read_csv(input);
  const auto fits = available_fits(rows);
  if (fits.empty()) throw qrmt::InsufficientData("no distance column has 3 distinct n");
  qrmt::write_text_file(out, qrmt::fits_json(fits) + "\n");
  std::vector<qrmt::Verdict> verdicts;
  for (const auto& f : fits) {
    if (f.distance == qrmt::Distance::bai_bound) continue;
    std::cout << qrmt::to_string(f.distance) << ": slope " << f.slope << ", intercept " << f.intercept
              << ", max C(n) " << f.max_bound_constant << '\n';
    verdicts.push_back({qrmt::to_string(f.distance) + "_slope", f.slope <= -0.40 + 0.05, ""});
  }
  return report_verdicts(verdicts);
}

int cmd_verify(const std::string& suite_name, std::uint64_t seed) {
  const auto suite = qrmt::parse_suite(suite_name);
  bool all = true;
  for (const auto& check : qrmt::suite_checks(suite)) {
    const auto r = qrmt::run_check(check, seed);
    std::cout << qrmt::format_check(r) << std::endl;
    all = all && r.passed;
  }
  return all ? kExitPass : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternion self-dual random matrices: spectra, distances and rate checks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over n");
  sweep->add_option("--config", config_path, "key = value config file")->required();

  std::string input, out;
  auto* rate = app.add_subcommand("rate", "fit log-log rates from a sweep CSV");
  rate->add_option("--input", input, "sweep CSV")->required();
  rate->add_option("--out", out, "fit JSON")->required();

  std::string suite = "all";
  std::uint64_t seed = 20240601;
  auto* verify = app.add_subcommand("verify", "run the verification checks");
  verify->add_option("--suite", suite, "structural | inequalities | all")
      ->check(CLI::IsMember({"structural", "inequalities", "all"}));
  verify->add_option("--seed", seed, "base seed");

  std::string bound_config;
  auto* bound = app.add_subcommand("bound", "certify the smoothing bound against every row of a sweep");
  bound->add_option("--config", bound_config, "key = value config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(config_path, false);
    if (*rate) return cmd_rate(input, out);
    if (*verify) return cmd_verify(suite, seed);
    if (*bound) return cmd_sweep(bound_config, true);
  } catch (const qrmt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
