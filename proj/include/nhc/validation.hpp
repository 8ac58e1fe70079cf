#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nhc {

enum class ValidationLevel { fast, full };

std::string_view to_string(ValidationLevel l);
ValidationLevel validation_level_from_string(std::string_view s);

struct ValidationOptions {
  ValidationLevel level = ValidationLevel::fast;
  std::uint64_t seed = 20240611;
  /// Test mode: perturb the metric in the GOmegaG suite so that it must fail.
  bool inject_fault = false;
};

struct CheckResult {
  std::string name;
  std::string invariant;
  bool passed = false;
  /// Reported but never counted as a failure.
  bool informational = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

/// Independent suite items run in parallel; results come back in a fixed order.
std::vector<CheckResult> run_validation(const ValidationOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

/// Tab-separated table: name, status (PASS/FAIL/INFO), value, threshold,
/// seconds, invariant, detail.
std::string format_table(const std::vector<CheckResult>& results);

}  // namespace nhc
