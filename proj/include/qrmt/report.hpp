#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qrmt/experiment.hpp"

namespace qrmt {

inline constexpr const char* kCsvHeader = "ensemble,n,rep,seed,kolmogorov,levy,bai_bound,runtime_ms";

struct ReportPaths {
  std::string csv;
  std::string json;
  std::string tsv;
};

/// Paths under config.output_dir.
ReportPaths report_paths(const SweepConfig& config);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& in);
std::vector<SweepRow> read_csv(const std::string& path);

std::string summary_json(const SweepResult& result, const std::vector<RateFit>& fits, const SweepConfig& config,
                         const std::vector<Verdict>& verdicts);
std::string fits_json(const std::vector<RateFit>& fits);

/// Writes CSV, JSON and TSV. Throws IoFailure naming the path.
void emit_report(const SweepResult& result, const std::vector<RateFit>& fits, const SweepConfig& config,
                 const std::vector<Verdict>& verdicts, const ReportPaths& paths);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace qrmt
