// The acceptance battery: ten numbered checks shared by the test suite and
// `lab verify`.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace symlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Worst observed quantity against its limit, human readable.
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  /// Empty runs all criteria 1..10.
  std::vector<int> only;
  /// Called after each criterion.
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line: `[PASS] C<id> <name>: <detail> (<seconds> s)`.
std::string format_result(const CriterionResult& r);

}  // namespace symlab
