#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "vfog/bandit.hpp"
#include "vfog/coding.hpp"
#include "vfog/core.hpp"
#include "vfog/mobility.hpp"
#include "vfog/random.hpp"

namespace vfog {

// ---------------------------------------------------------------------------
// Events

namespace event {
struct TaskRelease { TaskId task; };
struct NodeAppear { FogNode node; };
struct NodeDepart { NodeId node; };
struct UploadDone { std::uint64_t subtask; };
struct ComputeDone { std::uint64_t subtask; };
struct ResultDelivered { std::uint64_t subtask; };
struct DeadlineExpired { TaskId task; };
}  // namespace event

using EventPayload = std::variant<event::TaskRelease, event::NodeAppear, event::NodeDepart,
                                  event::UploadDone, event::ComputeDone,
                                  event::ResultDelivered, event::DeadlineExpired>;

const char* event_name(const EventPayload& payload);

struct SimEvent {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventPayload payload;
};

// Min-queue on (time, seq). seq is assigned on push and never reused, so
// simultaneous events leave in insertion order.
class EventQueue {
 public:
  std::uint64_t push(double time, EventPayload payload);
  SimEvent pop();
  const SimEvent& top() const;
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

// ---------------------------------------------------------------------------
// Configuration

struct HighwayScenario {
  enum class Population { Poisson, Fixed, Static };

  Population population = Population::Poisson;
  double arrival_rate_hz = 0.125;  // Poisson population
  std::uint32_t n_fog = 5;         // Fixed and Static populations
  double dwell_min_s = 20.0;
  double dwell_max_s = 60.0;
  double cpu_min_hz = 2e9;
  double cpu_max_hz = 5e9;
  // Static population only: explicit CPU speeds, one node each.
  std::vector<double> static_cpu_hz;

  void validate() const;
};

struct TraceScenario {
  std::string path;
  std::uint64_t client_id = 0;
  double range_m = 300.0;
};

enum class SpeedCoupling { None, Linear };

struct BetaScenario {
  RoadModel road;
  double mu0 = 0.05;  // 1/s at v_max under Linear coupling
  SpeedCoupling coupling = SpeedCoupling::Linear;
  double task_rate_hz = 0.05;
  double deadline_s = 20.0;
  std::uint32_t grid_points = 20;
  std::vector<double> speeds;  // explicit grid; empty = uniform grid on (0, v_max]
  std::vector<std::string> policies{"beta", "fifo"};
  std::optional<std::uint32_t> replication_cap;

  void validate() const;
  std::vector<double> speed_grid() const;
};

struct WorkloadConfig {
  double mean_interarrival_s = 0.5;
  double bits_min = 2e5;
  double bits_max = 1e6;
  double intensity = 1000.0;
  double output_bits = 0.0;
  std::optional<double> deadline_s;
  std::uint64_t max_tasks = 0;  // 0 = release until the horizon

  void validate() const;
};

struct MetricsConfig {
  double window_s = 50.0;
  std::uint64_t task_window = 250;
  std::vector<std::uint64_t> regret_checkpoints{1000, 2000, 4000, 8000};

  void validate() const;
};

// One policy paired with one coding scheme.
struct Variant {
  PolicyKind policy = PolicyKind::Alto;
  CodingScheme scheme;

  std::string label() const;  // e.g. "alto/rep2"
  static Variant parse(const std::string& text);
};

using Scenario = std::variant<HighwayScenario, TraceScenario, BetaScenario>;

struct SimConfig {
  std::string subcommand = "learn";
  double horizon = 2600.0;
  std::uint64_t seed = 1;
  std::uint32_t seeds = 30;  // replications; run i uses seed + i
  LinkModel link;
  double link_success_prob = 0.9;
  Scenario scenario = HighwayScenario{};
  WorkloadConfig workload;
  AltoParams alto;
  std::vector<Variant> variants;
  std::vector<std::uint32_t> n_fog_sweep;
  bool fallback = true;
  bool reoffload_on_departure = false;
  // Subtasks that have not started computing are discarded once their
  // parent task has finished.
  bool cancel_stale = true;
  double coding_overhead_s = 0.0;  // per subtask
  MetricsConfig metrics;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Results

enum class TaskOutcome { InFlight, Completed, DeadlineViolated, Orphaned };

const char* to_string(TaskOutcome outcome);

struct TaskRecord {
  TaskId id = 0;
  double release = 0.0;
  double bits = 0.0;
  TaskOutcome outcome = TaskOutcome::InFlight;
  double end_time = 0.0;  // completion, violation or orphaning instant

  double delay() const { return end_time - release; }
};

struct SubtaskRecord {
  std::uint64_t id = 0;
  TaskId task = 0;
  NodeId node = 0;
  double bits = 0.0;
  double dispatch_time = 0.0;
  std::optional<double> delivered;  // empty = failed or still running
};

struct LogEntry {
  double time = 0.0;
  std::string kind;
  std::uint64_t id = 0;  // task, node or subtask id depending on kind
};

struct RunCounts {
  std::uint64_t released = 0;
  std::uint64_t completed = 0;
  std::uint64_t violated = 0;
  std::uint64_t orphaned = 0;
  std::uint64_t in_flight = 0;

  bool conserved() const { return released == completed + violated + orphaned + in_flight; }
};

struct RunResult {
  std::uint64_t seed = 0;
  Variant variant;
  RunCounts counts;
  std::vector<TaskRecord> tasks;
  std::vector<SubtaskRecord> subtasks;
  std::vector<LogEntry> log;  // filled when requested
  RegretLedger regret;
  std::uint64_t decisions = 0;
  std::uint64_t index_evaluations = 0;
};

struct RunOptions {
  std::uint64_t seed = 1;
  Variant variant;
  std::optional<std::uint32_t> n_fog;  // overrides the highway population size
  bool record_log = false;
};

// Single-client offloading simulation over a highway or trace scenario.
class Simulator : private GroundTruth {
 public:
  // `timeline` preloads the trace for trace scenarios instead of reading
  // the configured path.
  Simulator(const SimConfig& config, RunOptions options,
            std::optional<TraceTimeline> timeline = std::nullopt);

  RunResult run();

  // Exposed for tests that drive departures by hand.
  void handle_node_departure(NodeId node);

 private:
  enum class Phase { Uploading, Queued, Computing, Downloading, Delivered, Failed, Cancelled };

  struct SubtaskRuntime {
    SubtaskRecord rec;
    Phase phase = Phase::Uploading;
    double compute_time = 0.0;
  };

  struct TaskRuntime {
    Task task;
    CodingScheme scheme;
    std::vector<std::uint64_t> subtasks;  // current dispatch attempt
    std::uint32_t required = 1;
    std::uint32_t received = 0;
    bool doomed = false;  // can no longer complete; waits for its deadline
    std::size_t record = 0;
  };

  struct NodeRuntime {
    FogNode node;
    bool present = false;
    std::deque<std::uint64_t> queue;
    std::optional<std::uint64_t> computing;
    double busy_until = 0.0;
  };

  double expected_delay(NodeId node, double bits, double intensity, double t) const override;

  void init_population();
  void schedule_next_release(double after);
  void schedule_node(FogNode node);
  FogNode make_highway_node(NodeId id, double appear);
  void process(const SimEvent& ev);
  void on_release(TaskId id);
  void on_appear(const FogNode& node);
  void on_upload_done(std::uint64_t sub);
  void on_compute_done(std::uint64_t sub);
  void on_delivered(std::uint64_t sub);
  void on_deadline(TaskId id);
  bool dispatch(TaskRuntime& tr);
  void start_next(NodeRuntime& nr);
  void fail_subtask(SubtaskRuntime& st);
  void cancel_subtask(SubtaskRuntime& st);
  void check_satisfiable(TaskRuntime& tr);
  void finish(TaskRuntime& tr, TaskOutcome outcome);
  void log(const char* kind, std::uint64_t id);

  SimConfig config_;
  RunOptions options_;
  std::optional<TraceTimeline> timeline_;
  Learner learner_;
  EventQueue queue_;
  double now_ = 0.0;
  std::map<NodeId, NodeRuntime> nodes_;
  std::map<TaskId, TaskRuntime> tasks_;
  std::vector<SubtaskRuntime> subtasks_;
  std::vector<TaskId> deferred_;
  TaskId next_task_ = 0;
  NodeId next_node_ = 1;
  RandomStream release_rng_;
  RandomStream arrival_rng_;
  RandomStream policy_rng_;
  RunResult result_;
  bool ran_ = false;
};

// Convenience wrapper: one seed, one variant.
RunResult simulate(const SimConfig& config, const RunOptions& options);

}  // namespace vfog
