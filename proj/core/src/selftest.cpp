#include "vfog/selftest.hpp"

#include "vfog/coding.hpp"
#include "vfog/random.hpp"

namespace vfog {

CodingOracleReport coding_oracle_check(std::uint64_t instances, std::uint64_t seed,
                                       std::uint32_t max_subtasks) {
  CodingOracleReport report;
  RandomStream rng(seed, "selftest.coding");
  for (std::uint64_t i = 0; i < instances; ++i) {
    const auto n = static_cast<std::uint32_t>(1 + rng.index(max_subtasks));
    CodingScheme scheme = CodingScheme::single();
    const auto kind = rng.index(3);
    if (kind == 1) scheme = CodingScheme::replicate(n);
    if (kind == 2) scheme = CodingScheme::mds(n, static_cast<std::uint32_t>(1 + rng.index(n)));
    std::vector<FinishTime> times;
    for (std::uint32_t k = 0; k < scheme.subtask_count(); ++k) {
      if (rng.uniform() < 0.25) {
        times.emplace_back(std::nullopt);
      } else {
        times.emplace_back(0.1 * static_cast<double>(rng.index(10)));
      }
    }
    ++report.instances;
    if (completion_time(times, scheme) != brute_force_completion(times, scheme)) ++report.mismatches;
  }
  return report;
}

std::vector<DpCase> shipped_dp_instances() {
  auto make = [](std::string name, std::vector<DpTask> tasks, double lambda, double mu) {
    DpCase c;
    c.name = std::move(name);
    c.instance.tasks = std::move(tasks);
    c.instance.lambda = lambda;
    c.instance.mu = mu;
    return c;
  };
  return {
      make("one-fresh", {{0, 10.0}}, 0.2, 0.05),
      make("two-fresh", {{0, 10.0}, {0, 10.0}}, 0.2, 0.05),
      make("two-uneven", {{0, 20.0}, {1, 20.0}}, 0.1, 0.05),
      make("three-fresh", {{0, 10.0}, {0, 10.0}, {0, 10.0}}, 0.3, 0.1),
      make("three-mixed", {{2, 15.0}, {0, 15.0}, {1, 15.0}}, 0.2, 0.05),
      make("three-sparse", {{0, 20.0}, {0, 20.0}, {0, 20.0}}, 0.05, 0.05),
      make("three-busy", {{1, 8.0}, {0, 8.0}, {3, 8.0}}, 0.5, 0.2),
  };
}

std::vector<DpOracleRow> dp_oracle_check(const std::vector<DpCase>& cases, double min_agreement) {
  std::vector<DpOracleRow> rows;
  for (const auto& c : cases) {
    DpOracleRow row;
    row.name = c.name;
    const DpSolution sol = dp_optimal(c.instance);
    row.optimal = sol.value;
    row.bound = sol.bound;
    row.beta = dp_evaluate_beta(c.instance);
    row.agreement = beta_agreement(c.instance, sol);
    row.value_ok = row.beta - row.optimal <= 2.0 * row.bound;
    row.agreement_ok = row.agreement.fraction() >= min_agreement;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace vfog
