#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vfog/core.hpp"
#include "vfog/engine.hpp"
#include "vfog/mobility.hpp"
#include "vfog/random.hpp"

namespace vfog {

// ---------------------------------------------------------------------------
// RSU task queue

struct PendingTask {
  TaskId id = 0;
  std::uint32_t replication_count = 0;
  double absolute_deadline = 0.0;
};

struct RsuQueueState {
  std::vector<PendingTask> pending;  // sorted by id
  double now = 0.0;

  // Advances the clock and drops tasks whose deadline has passed. Returns
  // the number of tasks dropped (violations).
  std::size_t advance(double t);
  void add(PendingTask task);
};

enum class RsuPolicy { Beta, Fifo, Edf };

std::string to_string(RsuPolicy policy);
RsuPolicy parse_rsu_policy(const std::string& name);

// Balanced task assignment: the pending task with the fewest replicas,
// then the earliest deadline, then the smallest id. Increments the chosen
// task's replication count. Empty queue gives nullopt.
std::optional<TaskId> beta_assign(RsuQueueState& state);

// Same contract for any RSU policy. Tasks already at `cap` replicas are not
// eligible.
std::optional<TaskId> rsu_assign(RsuPolicy policy, RsuQueueState& state,
                                 std::optional<std::uint32_t> cap = std::nullopt);

// ---------------------------------------------------------------------------
// Service model

struct BetaModel {
  double lambda = 0.0;  // fog vehicle arrivals per second
  double mu0 = 0.05;    // base sojourn rate, 1/s
  SpeedCoupling coupling = SpeedCoupling::None;
  double v = 0.0;
  double v_max = 30.0;

  void validate() const;
  // Effective sojourn rate; under Linear coupling faster traffic returns
  // results sooner.
  double mu() const;
};

// Outcome of one RSU run with explicit arrival instants.
struct RsuRunStats {
  std::uint64_t tasks = 0;
  std::uint64_t violated = 0;
  std::uint64_t assignments = 0;
};

// Replays vehicle arrivals against task releases. Each assignment's sojourn
// is standard_exponentials[k] / mu for the k-th vehicle, so runs that share
// the draws are coupled.
RsuRunStats simulate_rsu(double mu, const std::vector<double>& task_releases, double deadline,
                         const std::vector<double>& vehicle_arrivals,
                         const std::vector<double>& standard_exponentials, RsuPolicy policy,
                         std::optional<std::uint32_t> cap = std::nullopt);

struct TaskStream {
  double rate_hz = 0.05;
  double horizon_s = 2000.0;
};

struct ViolationEstimate {
  double ratio = 0.0;  // pooled over seeds
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> per_seed;
  std::uint64_t tasks = 0;
  std::uint64_t violated = 0;
};

ViolationEstimate simulate_violation_ratio(const BetaModel& model, const TaskStream& workload,
                                           double deadline, RsuPolicy policy,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::optional<std::uint32_t> cap = std::nullopt);

struct CurvePoint {
  double speed = 0.0;
  double violation_ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint32_t seeds = 0;
  std::vector<double> per_seed;
};

// Violation ratio per grid speed with lambda(v) = fog_arrival_rate(v).
std::vector<CurvePoint> violation_vs_speed(const RoadModel& road, const BetaScenario& scenario,
                                           const TaskStream& workload, RsuPolicy policy,
                                           const std::vector<std::uint64_t>& seeds);

// Index of the smallest ratio and whether the curve has a single local
// minimum (local minima no more than one grid cell apart are merged).
struct UnimodalityCheck {
  std::size_t argmin = 0;
  std::size_t local_minima = 0;
  bool unimodal = false;
};
UnimodalityCheck check_unimodal(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Finite-horizon MDP oracle

struct DpTask {
  std::uint32_t replication_count = 0;
  double residual_deadline = 0.0;
};

struct DpInstance {
  std::vector<DpTask> tasks;
  double lambda = 0.0;
  double mu = 0.0;
  std::uint32_t cap = 4;
  double time_step = 0.0;  // 0 = 1e-3 of the horizon

  static constexpr std::size_t kMaxTasks = 3;
  static constexpr std::uint32_t kMaxCap = 4;

  double horizon() const;
  double step() const;
};

// Backward-induction solution on the discretized chain. State codes pack
// one digit per task: 0 = finished or expired, c + 1 = alive with c
// replicas.
class DpSolution {
 public:
  double value = 0.0;  // optimal expected number of violations
  double bound = 0.0;  // documented discretization error bound
  std::uint32_t steps = 0;

  std::uint32_t encode(const std::vector<int>& digits) const;
  std::vector<int> decode(std::uint32_t code) const;
  std::uint32_t state_count() const { return state_count_; }
  std::uint32_t initial_state() const { return initial_; }

  // Bitmask of optimal assignment targets (bit i = task i) at step k for a
  // state after deadline expiry. Zero when no decision is available.
  std::uint8_t optimal_actions(std::uint32_t step, std::uint32_t state) const;

 private:
  friend DpSolution dp_optimal(const DpInstance&);
  std::uint32_t base_ = 0;
  std::uint32_t tasks_ = 0;
  std::uint32_t state_count_ = 0;
  std::uint32_t initial_ = 0;
  std::vector<std::uint8_t> masks_;
};

DpSolution dp_optimal(const DpInstance& instance);

// Expected violations when every decision follows beta_assign, on the same
// transition kernel.
double dp_evaluate_beta(const DpInstance& instance);

struct Agreement {
  std::uint64_t cells = 0;
  std::uint64_t agree = 0;
  double fraction() const { return cells == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(cells); }
};

// Fraction of reachable decision cells where BETA's choice is optimal.
Agreement beta_agreement(const DpInstance& instance, const DpSolution& solution);

// Error bound of the one-event-per-step discretization:
// N * (L^2 * H * dt + L * dt), L = lambda + N * cap * mu.
double discretization_bound(const DpInstance& instance);

}  // namespace vfog
