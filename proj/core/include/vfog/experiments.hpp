#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vfog/beta.hpp"
#include "vfog/engine.hpp"

namespace vfog {

struct SeriesPoint {
  double window_end = 0.0;
  std::optional<double> mean;  // empty when count == 0
  std::uint64_t count = 0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct TimedDelay {
  double time = 0.0;  // window coordinate (seconds or task index)
  double delay = 0.0;
};

// Tumbling-window means over [0, w), [w, 2w), ... up to the last window
// that holds an event.
std::vector<SeriesPoint> windowed_mean_delay(const std::vector<TimedDelay>& events, double window);

struct RegretCheckpoint {
  std::uint64_t tasks = 0;
  double mean_regret = 0.0;  // averaged over seeds
  std::vector<double> per_seed;
  friend bool operator==(const RegretCheckpoint&, const RegretCheckpoint&) = default;
};

// Aggregate of one variant (and population size) across seeds.
struct PolicySummary {
  std::string label;
  std::optional<std::uint32_t> n_fog;
  RunCounts counts;
  double mean_delay = 0.0;  // pooled over completed tasks
  double completion_ratio = 0.0;
  double violation_ratio = 0.0;
  std::vector<double> per_seed_mean_delay;
  std::vector<double> per_seed_tail_delay;  // last 20% of released tasks
  std::vector<double> per_seed_completion;
  double completion_ci_low = 0.0;
  double completion_ci_high = 0.0;
  std::vector<RegretCheckpoint> regret;
  std::vector<SeriesPoint> series_time;
  std::vector<SeriesPoint> series_task;
  std::uint64_t decisions = 0;
  std::uint64_t index_evaluations = 0;
};

struct SpeedCurve {
  std::string policy;
  std::vector<CurvePoint> points;
};

struct MetricsReport {
  std::string subcommand;
  std::string config_echo;  // canonical JSON of the effective configuration
  std::vector<std::uint64_t> seeds;
  std::vector<PolicySummary> summaries;
  std::vector<SpeedCurve> curves;

  const PolicySummary* find(const std::string& label,
                            std::optional<std::uint32_t> n_fog = std::nullopt) const;
};

std::string to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

// CSV renderings.
std::string series_time_csv(const MetricsReport& report);
std::string series_task_csv(const MetricsReport& report);
std::string completion_csv(const MetricsReport& report);
std::string speed_curve_csv(const SpeedCurve& curve);

struct ExperimentOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  bool record_log = false;
};

std::vector<std::uint64_t> seed_list(const SimConfig& config);

// Reduces per-seed runs of one variant to a summary. Runs must be ordered by
// seed.
PolicySummary summarize(const SimConfig& config, const std::vector<RunResult>& runs);

// Single seed, single variant; the variant defaults to the first configured
// one.
MetricsReport run(const SimConfig& config);

// Average delay over time for every configured variant.
MetricsReport run_case_a(const SimConfig& config, const ExperimentOptions& options = {});

// Completion ratio versus the number of fog vehicles, for every variant and
// every entry of n_fog_sweep.
MetricsReport run_coded_sweep(const SimConfig& config, const ExperimentOptions& options = {});

// Violation ratio versus speed for every configured RSU policy.
MetricsReport run_case_b(const SimConfig& config, const ExperimentOptions& options = {});

// Runs `fn(i)` for i in [0, n) on up to `threads` workers. Results are
// returned in index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn fn);

}  // namespace vfog

#include "vfog/detail/parallel.hpp"
