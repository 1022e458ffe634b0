#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qrmt {

struct CheckResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  ///< seconds; 0 = unlimited
};

enum class Suite { structural, inequalities, all };

Suite parse_suite(const std::string& name);

CheckResult check_quaternion_algebra(std::uint64_t seed);
CheckResult check_even_multiplicity(std::uint64_t seed);
CheckResult check_type2_inverse(std::uint64_t seed);
CheckResult check_epsilon_scalar(std::uint64_t seed);
CheckResult check_trace_interlacing(std::uint64_t seed);
CheckResult check_bai_inequality(std::uint64_t seed);
CheckResult check_perturbation_bounds(std::uint64_t seed);
CheckResult check_semicircle_calculus(std::uint64_t seed);
CheckResult check_rate_sweep(std::uint64_t seed);
CheckResult check_truncation_pipeline(std::uint64_t seed);
CheckResult check_delta_diagnostic(std::uint64_t seed);

struct NamedCheck {
  int id = 0;
  std::function<CheckResult(std::uint64_t)> run;
};

/// Checks 1-5 (structural), 6-8 (inequalities) or all eleven, in order.
std::vector<NamedCheck> suite_checks(Suite suite);

/// Runs a check, timing it; exceptions become a failed result.
CheckResult run_check(const NamedCheck& check, std::uint64_t seed);

/// "PASS [3] title (1.2 s): detail"
std::string format_check(const CheckResult& r);

}  // namespace qrmt
