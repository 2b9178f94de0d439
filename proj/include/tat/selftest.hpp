#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tat {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::vector<std::string> failures;
  /// Named counters, e.g. points checked and precision retries.
  std::vector<std::pair<std::string, double>> stats;
};

struct SelftestOptions {
  /// Constants file checked by the ledger suite (its expected c6..C included).
  std::optional<std::string> constants_path;
  /// Precision cap for canonical heights in bits; 0 leaves it uncapped.
  int precision_cap_bits = 0;
};

SuiteResult heights_suite(const SelftestOptions& opt);
SuiteResult enumeration_suite(const SelftestOptions& opt);
SuiteResult ledger_suite(const SelftestOptions& opt);

/// The three suites in order.
std::vector<SuiteResult> run_selftest(const SelftestOptions& opt);

}  // namespace tat
