#pragma once

// Reference checks for the numbered acceptance criteria. Each check builds
// its own oracle (closed forms, brute-force products) and compares it with
// the library.

#include <cstdint>
#include <string>
#include <vector>

namespace rswalk {

struct CriterionResult {
  int number = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 12345;
};

inline constexpr int kCriterionCount = 11;

/// Runs criterion 1..11. Exceptions inside a check turn into a FAIL with the
/// message as detail.
CriterionResult run_criterion(int number, const AcceptanceOptions& opts = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "PASS criterion N: title (detail)"
std::string format_result(const CriterionResult& r);

}  // namespace rswalk
