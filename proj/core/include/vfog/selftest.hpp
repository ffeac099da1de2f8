#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vfog/beta.hpp"

namespace vfog {

struct CodingOracleReport {
  std::uint64_t instances = 0;
  std::uint64_t mismatches = 0;
  bool passed() const { return mismatches == 0; }
};

// Compares completion_time with brute_force_completion on random schemes
// with at most `max_subtasks` subtasks. Finish times are drawn on a coarse
// grid so ties are common.
CodingOracleReport coding_oracle_check(std::uint64_t instances, std::uint64_t seed,
                                       std::uint32_t max_subtasks = 6);

struct DpCase {
  std::string name;
  DpInstance instance;
};

// Small instances with a common deadline shipped with the library.
std::vector<DpCase> shipped_dp_instances();

struct DpOracleRow {
  std::string name;
  double optimal = 0.0;
  double beta = 0.0;
  double bound = 0.0;
  Agreement agreement;
  bool value_ok = false;
  bool agreement_ok = false;
};

// Value within 2x the discretization bound and agreement >= min_agreement.
std::vector<DpOracleRow> dp_oracle_check(const std::vector<DpCase>& cases,
                                         double min_agreement = 0.99);

}  // namespace vfog
