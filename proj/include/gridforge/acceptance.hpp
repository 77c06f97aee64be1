#pragma once

// The nine acceptance criteria, shared by `gridforge selftest` and the
// acceptance test binary.

#include <string>
#include <vector>

#include <json.hpp>

namespace gridforge {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0;
  double time_limit = 0;             // seconds; part of the criterion
  std::vector<std::string> failures;  // one entry per failing item
  std::vector<std::string> known;     // failures that match documented errata in the reference data
  std::string detail;                 // summary of what was checked

  /// Failed, but every failure is a documented erratum of the printed data.
  bool known_unattainable() const { return !pass && failures == known; }
  std::string line() const;
  nlohmann::json to_json() const;
};

CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_acceptance();

/// True when every criterion passed or failed only on documented errata.
bool acceptance_ok(const std::vector<CriterionResult>& results);

}  // namespace gridforge
