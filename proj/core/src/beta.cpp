#include "vfog/beta.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "vfog/error.hpp"
#include "vfog/stats.hpp"

namespace vfog {

// ---------------------------------------------------------------------------
// RSU queue and policies

std::size_t RsuQueueState::advance(double t) {
  now = t;
  const auto before = pending.size();
  std::erase_if(pending, [t](const PendingTask& p) { return p.absolute_deadline <= t; });
  return before - pending.size();
}

void RsuQueueState::add(PendingTask task) {
  auto it = std::lower_bound(pending.begin(), pending.end(), task.id,
                             [](const PendingTask& p, TaskId id) { return p.id < id; });
  pending.insert(it, task);
}

std::string to_string(RsuPolicy policy) {
  switch (policy) {
    case RsuPolicy::Beta: return "beta";
    case RsuPolicy::Fifo: return "fifo";
    case RsuPolicy::Edf: return "edf";
  }
  return "unknown";
}

RsuPolicy parse_rsu_policy(const std::string& name) {
  if (name == "beta") return RsuPolicy::Beta;
  if (name == "fifo") return RsuPolicy::Fifo;
  if (name == "edf") return RsuPolicy::Edf;
  throw InvalidParameter("unknown RSU policy '" + name + "'");
}

std::optional<TaskId> rsu_assign(RsuPolicy policy, RsuQueueState& state,
                                 std::optional<std::uint32_t> cap) {
  PendingTask* best = nullptr;
  auto key = [policy](const PendingTask& p) {
    switch (policy) {
      case RsuPolicy::Beta:
        return std::make_tuple(static_cast<double>(p.replication_count), p.absolute_deadline, p.id);
      case RsuPolicy::Fifo:
        return std::make_tuple(0.0, 0.0, p.id);
      case RsuPolicy::Edf:
        return std::make_tuple(0.0, p.absolute_deadline, p.id);
    }
    return std::make_tuple(0.0, 0.0, p.id);
  };
  for (auto& p : state.pending) {
    if (cap && p.replication_count >= *cap) continue;
    if (best == nullptr || key(p) < key(*best)) best = &p;
  }
  if (best == nullptr) return std::nullopt;
  ++best->replication_count;
  return best->id;
}

std::optional<TaskId> beta_assign(RsuQueueState& state) {
  return rsu_assign(RsuPolicy::Beta, state);
}

// ---------------------------------------------------------------------------
// Service model

void BetaModel::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("beta model: lambda must be non-negative");
  if (!(mu0 > 0.0)) throw ConfigError("beta model: mu0 must be positive");
  if (coupling == SpeedCoupling::Linear) {
    if (!(v_max > 0.0)) throw ConfigError("beta model: v_max must be positive");
    if (!(v > 0.0) || v > v_max) throw ConfigError("beta model: v must lie in (0, v_max]");
  }
}

double BetaModel::mu() const {
  return coupling == SpeedCoupling::Linear ? mu0 * v / v_max : mu0;
}

RsuRunStats simulate_rsu(double mu, const std::vector<double>& task_releases, double deadline,
                         const std::vector<double>& vehicle_arrivals,
                         const std::vector<double>& standard_exponentials, RsuPolicy policy,
                         std::optional<std::uint32_t> cap) {
  if (!(mu > 0.0)) throw InvalidParameter("sojourn rate must be positive");
  if (!(deadline > 0.0)) throw InvalidParameter("deadline must be positive");
  if (standard_exponentials.size() < vehicle_arrivals.size()) {
    throw InvalidParameter("one sojourn draw is needed per vehicle");
  }
  const std::size_t n = task_releases.size();
  std::vector<double> earliest(n, kInf);
  RsuQueueState queue;
  std::size_t next = 0;
  RsuRunStats stats;
  stats.tasks = n;

  for (std::size_t k = 0; k < vehicle_arrivals.size(); ++k) {
    const double a = vehicle_arrivals[k];
    while (next < n && task_releases[next] <= a) {
      queue.add({next, 0, task_releases[next] + deadline});
      ++next;
    }
    queue.advance(a);
    // The RSU learns about a completion once the result is back.
    std::erase_if(queue.pending, [&](const PendingTask& p) { return earliest[p.id] <= a; });
    if (queue.pending.empty()) {
      if (next == n) break;
      continue;
    }
    const auto chosen = rsu_assign(policy, queue, cap);
    if (!chosen) continue;
    ++stats.assignments;
    earliest[*chosen] = std::min(earliest[*chosen], a + standard_exponentials[k] / mu);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(earliest[i] <= task_releases[i] + deadline)) ++stats.violated;
  }
  return stats;
}

namespace {

std::vector<double> exponential_times(RandomStream& rng, double rate, double horizon) {
  std::vector<double> out;
  if (rate <= 0.0) return out;
  double t = 0.0;
  for (;;) {
    t += -std::log(rng.uniform_pos()) / rate;
    if (t > horizon) break;
    out.push_back(t);
  }
  return out;
}

}  // namespace

ViolationEstimate simulate_violation_ratio(const BetaModel& model, const TaskStream& workload,
                                           double deadline, RsuPolicy policy,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::optional<std::uint32_t> cap) {
  model.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(deadline > 0.0)) throw ConfigError("deadline must be positive");
  if (!(workload.rate_hz >= 0.0) || !(workload.horizon_s > 0.0)) {
    throw ConfigError("task stream needs a non-negative rate and a positive horizon");
  }
  const double mu = model.mu();
  ViolationEstimate est;
  for (const auto seed : seeds) {
    RandomStream task_rng(seed, "beta.task");
    RandomStream arrival_rng(seed, "beta.arrival");
    RandomStream sojourn_rng(seed, "beta.sojourn");
    const auto releases = exponential_times(task_rng, workload.rate_hz, workload.horizon_s);
    const auto arrivals = exponential_times(arrival_rng, model.lambda, workload.horizon_s + deadline);
    std::vector<double> draws(arrivals.size());
    for (auto& d : draws) d = -std::log(sojourn_rng.uniform_pos());
    const auto stats = simulate_rsu(mu, releases, deadline, arrivals, draws, policy, cap);
    est.tasks += stats.tasks;
    est.violated += stats.violated;
    if (stats.tasks > 0) {
      est.per_seed.push_back(static_cast<double>(stats.violated) / static_cast<double>(stats.tasks));
    }
  }
  est.ratio = est.tasks == 0 ? 0.0 : static_cast<double>(est.violated) / static_cast<double>(est.tasks);
  const auto ci = stats::mean_ci(est.per_seed);
  est.ci_low = std::clamp(ci.low, 0.0, 1.0);
  est.ci_high = std::clamp(ci.high, 0.0, 1.0);
  return est;
}

std::vector<CurvePoint> violation_vs_speed(const RoadModel& road, const BetaScenario& scenario,
                                           const TaskStream& workload, RsuPolicy policy,
                                           const std::vector<std::uint64_t>& seeds) {
  road.validate();
  std::vector<CurvePoint> curve;
  for (const double v : scenario.speed_grid()) {
    BetaModel model;
    model.lambda = fog_arrival_rate(v, road);
    model.mu0 = scenario.mu0;
    model.coupling = scenario.coupling;
    model.v = v;
    model.v_max = road.v_max;
    const auto est = simulate_violation_ratio(model, workload, scenario.deadline_s, policy, seeds,
                                              scenario.replication_cap);
    CurvePoint p;
    p.speed = v;
    p.violation_ratio = stats::mean(est.per_seed);
    p.ci_low = est.ci_low;
    p.ci_high = est.ci_high;
    p.seeds = static_cast<std::uint32_t>(est.per_seed.size());
    p.per_seed = est.per_seed;
    curve.push_back(std::move(p));
  }
  return curve;
}

UnimodalityCheck check_unimodal(const std::vector<double>& values) {
  UnimodalityCheck out;
  if (values.empty()) return out;
  out.argmin = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  // Collapse equal neighbours into runs, then find runs lower than both
  // neighbouring runs.
  struct Run {
    std::size_t first, last;
    double value;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!runs.empty() && runs.back().value == values[i]) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i, values[i]});
    }
  }
  std::vector<Run> minima;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const bool left = r == 0 || runs[r - 1].value > runs[r].value;
    const bool right = r + 1 == runs.size() || runs[r + 1].value > runs[r].value;
    if (left && right) minima.push_back(runs[r]);
  }
  std::size_t merged = 0;
  for (std::size_t i = 0; i < minima.size(); ++i) {
    if (i == 0 || minima[i].first - minima[i - 1].last > 2) ++merged;
  }
  out.local_minima = merged;
  out.unimodal = merged == 1;
  return out;
}

}  // namespace vfog
