#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stoqlab::suite {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct SuiteConfig {
  std::uint64_t seed = 20250810;
  std::string only;  // substring filter on criterion names; empty = all
};

// Runs the acceptance battery, printing one pass/fail line per criterion.
std::vector<CriterionResult> run_acceptance_suite(const SuiteConfig& cfg, std::ostream& out);

}  // namespace stoqlab::suite
