#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace optomech {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string measured;
  std::string expected;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 2024;
  std::vector<int> only;  // empty: all criteria
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriterionCount = 13;

// Runs the acceptance criteria with their pinned parameter sets and tolerances.
// Exceptions inside a criterion mark it failed with the error message.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// "PASS  5  title | measured ... | expected ..."
std::string result_line(const CriterionResult& r);

}  // namespace optomech
