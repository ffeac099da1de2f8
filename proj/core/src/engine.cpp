#include "vfog/engine.hpp"

#include <algorithm>
#include <cmath>

#include "vfog/error.hpp"

namespace vfog {

// ---------------------------------------------------------------------------
// EventQueue

const char* event_name(const EventPayload& payload) {
  struct V {
    const char* operator()(const event::TaskRelease&) const { return "TaskRelease"; }
    const char* operator()(const event::NodeAppear&) const { return "NodeAppear"; }
    const char* operator()(const event::NodeDepart&) const { return "NodeDepart"; }
    const char* operator()(const event::UploadDone&) const { return "UploadDone"; }
    const char* operator()(const event::ComputeDone&) const { return "ComputeDone"; }
    const char* operator()(const event::ResultDelivered&) const { return "ResultDelivered"; }
    const char* operator()(const event::DeadlineExpired&) const { return "DeadlineExpired"; }
  };
  return std::visit(V{}, payload);
}

std::uint64_t EventQueue::push(double time, EventPayload payload) {
  if (std::isnan(time)) throw InternalConsistency("event time is NaN");
  const std::uint64_t seq = next_seq_++;
  heap_.push(SimEvent{time, seq, std::move(payload)});
  return seq;
}

SimEvent EventQueue::pop() {
  if (heap_.empty()) throw InternalConsistency("pop from an empty event queue");
  SimEvent ev = heap_.top();
  heap_.pop();
  return ev;
}

const SimEvent& EventQueue::top() const {
  if (heap_.empty()) throw InternalConsistency("top of an empty event queue");
  return heap_.top();
}

// ---------------------------------------------------------------------------
// Configuration

void HighwayScenario::validate() const {
  if (population == Population::Poisson && !(arrival_rate_hz >= 0.0)) {
    throw ConfigError("scenario.arrival_rate_hz must be non-negative");
  }
  if (population != Population::Poisson && n_fog == 0 && static_cpu_hz.empty()) {
    throw ConfigError("scenario.n_fog must be at least 1");
  }
  if (!(dwell_min_s > 0.0) || !(dwell_min_s <= dwell_max_s)) {
    throw ConfigError("scenario.dwell_min_s/dwell_max_s must satisfy 0 < min <= max");
  }
  if (!(cpu_min_hz > 0.0) || !(cpu_min_hz <= cpu_max_hz)) {
    throw ConfigError("scenario.cpu_min_hz/cpu_max_hz must satisfy 0 < min <= max");
  }
  for (double f : static_cpu_hz) {
    if (!(f > 0.0)) throw ConfigError("scenario.static_cpu_hz entries must be positive");
  }
}

void BetaScenario::validate() const {
  try {
    road.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("scenario.road: ") + e.what());
  }
  if (!(mu0 > 0.0)) throw ConfigError("scenario.mu0 must be positive");
  if (!(task_rate_hz >= 0.0)) throw ConfigError("scenario.task_rate_hz must be non-negative");
  if (!(deadline_s > 0.0)) throw ConfigError("scenario.deadline_s must be positive");
  if (speeds.empty() && grid_points == 0) throw ConfigError("scenario.grid_points must be >= 1");
  for (double v : speeds) {
    if (!(v > 0.0) || v > road.v_max) throw ConfigError("scenario.speeds must lie in (0, v_max]");
  }
  if (policies.empty()) throw ConfigError("scenario.policies must not be empty");
  for (const auto& p : policies) {
    if (p != "beta" && p != "fifo" && p != "edf") {
      throw ConfigError("scenario.policies: unknown policy '" + p + "'");
    }
  }
  if (replication_cap && *replication_cap == 0) {
    throw ConfigError("scenario.replication_cap must be >= 1");
  }
}

std::vector<double> BetaScenario::speed_grid() const {
  if (!speeds.empty()) return speeds;
  std::vector<double> out;
  for (std::uint32_t i = 1; i <= grid_points; ++i) {
    out.push_back(road.v_max * static_cast<double>(i) / static_cast<double>(grid_points));
  }
  return out;
}

void WorkloadConfig::validate() const {
  if (!(mean_interarrival_s > 0.0)) throw ConfigError("workload.mean_interarrival_s must be positive");
  if (!(bits_min > 0.0) || !(bits_min <= bits_max)) {
    throw ConfigError("workload.bits_min/bits_max must satisfy 0 < min <= max");
  }
  if (!(intensity > 0.0)) throw ConfigError("workload.intensity must be positive");
  if (!(output_bits >= 0.0)) throw ConfigError("workload.output_bits must be non-negative");
  if (deadline_s && !(*deadline_s > 0.0)) throw ConfigError("workload.deadline_s must be positive");
}

void MetricsConfig::validate() const {
  if (!(window_s > 0.0)) throw ConfigError("metrics.window_s must be positive");
  if (task_window == 0) throw ConfigError("metrics.task_window must be positive");
}

std::string Variant::label() const { return to_string(policy) + "/" + scheme.name(); }

Variant Variant::parse(const std::string& text) {
  Variant v;
  const auto slash = text.find('/');
  v.policy = parse_policy(text.substr(0, slash));
  v.scheme = slash == std::string::npos ? CodingScheme::single()
                                        : CodingScheme::parse(text.substr(slash + 1));
  return v;
}

void SimConfig::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("horizon_s must be positive");
  if (seeds == 0) throw ConfigError("seeds must be at least 1");
  if (!(link.data_rate_bps > 0.0)) throw ConfigError("link.data_rate_bps must be positive");
  if (link.retry_slot && !(*link.retry_slot >= 0.0)) {
    throw ConfigError("link.retry_slot_s must be non-negative");
  }
  if (!(link_success_prob > 0.0) || link_success_prob > 1.0) {
    throw ConfigError("link.link_success_prob must lie in (0, 1], got " +
                      std::to_string(link_success_prob));
  }
  workload.validate();
  metrics.validate();
  try {
    alto.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("alto: ") + e.what());
  }
  if (!(coding_overhead_s >= 0.0)) throw ConfigError("coding.overhead_s must be non-negative");
  std::visit([](const auto& s) {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, HighwayScenario> || std::is_same_v<T, BetaScenario>) {
      s.validate();
    } else {
      if (s.path.empty()) throw ConfigError("scenario.path must be set for trace scenarios");
      if (!(s.range_m >= 0.0)) throw ConfigError("scenario.range_m must be non-negative");
    }
  }, scenario);
  if (const auto* hw = std::get_if<HighwayScenario>(&scenario)) {
    if (hw->population != HighwayScenario::Population::Poisson && !fallback) {
      std::vector<std::uint32_t> sizes = n_fog_sweep;
      if (sizes.empty()) sizes.push_back(hw->static_cpu_hz.empty() ? hw->n_fog
                                          : static_cast<std::uint32_t>(hw->static_cpu_hz.size()));
      for (const auto& v : variants) {
        for (auto n : sizes) {
          if (v.scheme.subtask_count() > n) {
            throw ConfigError("coding: " + v.scheme.name() + " needs " +
                              std::to_string(v.scheme.subtask_count()) +
                              " fog vehicles but the scenario provides " + std::to_string(n) +
                              " and coding.fallback is false");
          }
        }
      }
    }
  }
  for (auto n : n_fog_sweep) {
    if (n == 0) throw ConfigError("n_fog_sweep entries must be >= 1");
  }
}

const char* to_string(TaskOutcome outcome) {
  switch (outcome) {
    case TaskOutcome::InFlight: return "in_flight";
    case TaskOutcome::Completed: return "completed";
    case TaskOutcome::DeadlineViolated: return "violated";
    case TaskOutcome::Orphaned: return "orphaned";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Simulator

namespace {

CodingScheme fallback_scheme(const CodingScheme& scheme, std::uint32_t available) {
  if (const auto* m = std::get_if<MdsScheme>(&scheme.variant())) {
    if (available >= m->m) return CodingScheme::mds(available, m->m);
  }
  return available == 1 ? CodingScheme::single() : CodingScheme::replicate(available);
}

}  // namespace

Simulator::Simulator(const SimConfig& config, RunOptions options,
                     std::optional<TraceTimeline> timeline)
    : config_(config),
      options_(std::move(options)),
      timeline_(std::move(timeline)),
      learner_(options_.variant.policy, config.alto),
      release_rng_(options_.seed, "release"),
      arrival_rng_(options_.seed, "node-arrival"),
      policy_rng_(options_.seed, "policy") {
  config_.validate();
  if (std::holds_alternative<BetaScenario>(config_.scenario)) {
    throw ConfigError("scenario: beta-rsu scenarios run through the beta sweep, not the engine");
  }
  if (const auto* tr = std::get_if<TraceScenario>(&config_.scenario)) {
    if (!timeline_) timeline_ = load_trace_file(tr->path);
  } else {
    timeline_.reset();
  }
}

void Simulator::log(const char* kind, std::uint64_t id) {
  if (options_.record_log) result_.log.push_back({now_, kind, id});
}

FogNode Simulator::make_highway_node(NodeId id, double appear) {
  const auto& hw = std::get<HighwayScenario>(config_.scenario);
  RandomStream rng(options_.seed, "node", id);
  FogNode n;
  n.id = id;
  n.kind = NodeKind::FogVehicle;
  n.cpu_hz = rng.uniform(hw.cpu_min_hz, hw.cpu_max_hz);
  const double dwell = rng.uniform(hw.dwell_min_s, hw.dwell_max_s);
  n.appear_time = appear;
  n.depart_time = hw.population == HighwayScenario::Population::Static ? kInf : appear + dwell;
  n.link_success_prob = config_.link_success_prob;
  return n;
}

void Simulator::schedule_node(FogNode node) {
  const double t = node.appear_time;
  queue_.push(t, event::NodeAppear{std::move(node)});
}

void Simulator::init_population() {
  if (timeline_) {
    const auto& tr = std::get<TraceScenario>(config_.scenario);
    for (auto& n : contact_intervals(*timeline_, tr.client_id, tr.range_m,
                                     config_.link_success_prob)) {
      schedule_node(n);
    }
    return;
  }
  const auto& hw = std::get<HighwayScenario>(config_.scenario);
  using P = HighwayScenario::Population;
  switch (hw.population) {
    case P::Poisson: {
      const double mean_dwell = 0.5 * (hw.dwell_min_s + hw.dwell_max_s);
      const auto initial = static_cast<std::uint32_t>(std::lround(hw.arrival_rate_hz * mean_dwell));
      for (std::uint32_t i = 0; i < initial; ++i) schedule_node(make_highway_node(next_node_++, 0.0));
      if (hw.arrival_rate_hz > 0.0) {
        for (double t : sample_arrivals(hw.arrival_rate_hz, config_.horizon, arrival_rng_)) {
          schedule_node(make_highway_node(next_node_++, t));
        }
      }
      break;
    }
    case P::Fixed: {
      const std::uint32_t n = options_.n_fog.value_or(hw.n_fog);
      for (std::uint32_t i = 0; i < n; ++i) schedule_node(make_highway_node(next_node_++, 0.0));
      break;
    }
    case P::Static: {
      if (!hw.static_cpu_hz.empty()) {
        for (double f : hw.static_cpu_hz) {
          FogNode node = make_highway_node(next_node_++, 0.0);
          node.cpu_hz = f;
          schedule_node(node);
        }
      } else {
        const std::uint32_t n = options_.n_fog.value_or(hw.n_fog);
        for (std::uint32_t i = 0; i < n; ++i) schedule_node(make_highway_node(next_node_++, 0.0));
      }
      break;
    }
  }
}

void Simulator::schedule_next_release(double after) {
  const auto& w = config_.workload;
  if (w.max_tasks != 0 && next_task_ >= w.max_tasks) return;
  const double t = after + release_rng_.exponential(1.0 / w.mean_interarrival_s);
  if (t > config_.horizon) return;
  queue_.push(t, event::TaskRelease{next_task_++});
}

RunResult Simulator::run() {
  if (ran_) throw InternalConsistency("Simulator::run called twice");
  ran_ = true;
  result_.seed = options_.seed;
  result_.variant = options_.variant;

  init_population();
  schedule_next_release(0.0);

  const bool bounded = config_.workload.max_tasks != 0;
  while (!queue_.empty() && queue_.top().time <= config_.horizon) {
    const SimEvent ev = queue_.pop();
    now_ = ev.time;
    process(ev);
    if (bounded && next_task_ >= config_.workload.max_tasks && deferred_.empty()) {
      const bool all_done = std::all_of(result_.tasks.begin(), result_.tasks.end(),
                                        [](const TaskRecord& r) { return r.outcome != TaskOutcome::InFlight; });
      if (all_done && result_.tasks.size() == config_.workload.max_tasks) break;
    }
  }

  // Tasks still waiting for a candidate at the horizon are orphaned.
  for (const TaskId id : deferred_) {
    auto& tr = tasks_.at(id);
    auto& rec = result_.tasks[tr.record];
    if (rec.outcome == TaskOutcome::InFlight) {
      rec.outcome = TaskOutcome::Orphaned;
      rec.end_time = config_.horizon;
    }
  }

  RunCounts c;
  for (const auto& r : result_.tasks) {
    ++c.released;
    switch (r.outcome) {
      case TaskOutcome::Completed: ++c.completed; break;
      case TaskOutcome::DeadlineViolated: ++c.violated; break;
      case TaskOutcome::Orphaned: ++c.orphaned; break;
      case TaskOutcome::InFlight: ++c.in_flight; break;
    }
  }
  if (!c.conserved()) throw InternalConsistency("task conservation violated");
  result_.counts = c;
  for (const auto& st : subtasks_) result_.subtasks.push_back(st.rec);
  result_.index_evaluations = learner_.index_evaluations();
  return std::move(result_);
}

void Simulator::process(const SimEvent& ev) {
  std::visit([this](const auto& e) {
    using T = std::decay_t<decltype(e)>;
    if constexpr (std::is_same_v<T, event::TaskRelease>) {
      on_release(e.task);
    } else if constexpr (std::is_same_v<T, event::NodeAppear>) {
      on_appear(e.node);
    } else if constexpr (std::is_same_v<T, event::NodeDepart>) {
      handle_node_departure(e.node);
    } else if constexpr (std::is_same_v<T, event::UploadDone>) {
      on_upload_done(e.subtask);
    } else if constexpr (std::is_same_v<T, event::ComputeDone>) {
      on_compute_done(e.subtask);
    } else if constexpr (std::is_same_v<T, event::ResultDelivered>) {
      on_delivered(e.subtask);
    } else {
      on_deadline(e.task);
    }
  }, ev.payload);
}

void Simulator::on_release(TaskId id) {
  const auto& w = config_.workload;
  RandomStream rng(options_.seed, "task", id);
  Task task;
  task.id = id;
  task.release_time = now_;
  task.input_bits = w.bits_min == w.bits_max ? w.bits_min : rng.uniform(w.bits_min, w.bits_max);
  task.intensity = w.intensity;
  task.output_bits = w.output_bits;
  task.deadline = w.deadline_s;

  TaskRuntime tr;
  tr.task = task;
  tr.record = result_.tasks.size();
  result_.tasks.push_back({id, now_, task.input_bits, TaskOutcome::InFlight, 0.0});
  auto& slot = tasks_.emplace(id, std::move(tr)).first->second;
  log("TaskRelease", id);

  if (task.deadline) queue_.push(now_ + *task.deadline, event::DeadlineExpired{id});
  if (!dispatch(slot)) deferred_.push_back(id);
  schedule_next_release(now_);
}

bool Simulator::dispatch(TaskRuntime& tr) {
  const auto available = static_cast<std::uint32_t>(learner_.present_count());
  if (available == 0) return false;
  CodingScheme scheme = options_.variant.scheme;
  if (scheme.subtask_count() > available) {
    if (!config_.fallback) return false;
    scheme = fallback_scheme(scheme, available);
  }
  const Task& task = tr.task;
  const double bits = scheme.subtask_bits(task.input_bits);
  const auto nodes = learner_.select_many(task, bits, now_, scheme.subtask_count(), policy_rng_, this);
  ++result_.decisions;

  if (scheme.subtask_count() == 1) {
    double best = kInf;
    for (const NodeId id : learner_.present_arms()) {
      best = std::min(best, expected_delay(id, bits, task.intensity, now_));
    }
    const double chosen = expected_delay(nodes.front(), bits, task.intensity, now_);
    result_.regret.record(now_, nodes.front(), chosen, best);
  }

  const SubtaskSet set = encode(task, scheme, nodes, subtasks_.size());
  tr.scheme = scheme;
  tr.required = set.required_results;
  tr.received = 0;
  tr.doomed = false;
  tr.subtasks.clear();
  const std::uint64_t attempt = result_.decisions;
  for (const auto& s : set.subtasks) {
    SubtaskRuntime st;
    st.rec = {s.id, task.id, s.node, s.bits, now_, std::nullopt};
    st.phase = Phase::Uploading;
    RandomStream link_rng(options_.seed, "uplink", task.id, s.node + (attempt << 40));
    const double up = sample_upload_delay(s.bits, config_.link, config_.link_success_prob, link_rng).delay;
    subtasks_.push_back(st);
    tr.subtasks.push_back(s.id);
    queue_.push(now_ + config_.coding_overhead_s + up, event::UploadDone{s.id});
    log("Dispatch", s.id);
  }
  return true;
}

void Simulator::on_appear(const FogNode& node) {
  auto& nr = nodes_[node.id];
  nr.node = node;
  nr.present = true;
  nr.queue.clear();
  nr.computing.reset();
  nr.busy_until = now_;
  learner_.on_node_appear(node.id, now_);
  if (std::isfinite(node.depart_time)) queue_.push(node.depart_time, event::NodeDepart{node.id});
  log("NodeAppear", node.id);

  if (!deferred_.empty()) {
    std::vector<TaskId> still;
    for (const TaskId id : deferred_) {
      auto& tr = tasks_.at(id);
      if (result_.tasks[tr.record].outcome != TaskOutcome::InFlight) continue;
      if (!dispatch(tr)) still.push_back(id);
    }
    deferred_ = std::move(still);
  }
}

void Simulator::handle_node_departure(NodeId node) {
  auto it = nodes_.find(node);
  if (it == nodes_.end()) throw InternalConsistency("departure of unknown node " + std::to_string(node));
  auto& nr = it->second;
  // A departure can be applied early by a same-instant event; the queued
  // NodeDepart then finds the node already gone.
  if (!nr.present) return;
  nr.present = false;
  nr.queue.clear();
  nr.computing.reset();
  learner_.on_node_depart(node);
  log("NodeDepart", node);

  std::vector<TaskId> affected;
  for (auto& st : subtasks_) {
    if (st.rec.node != node) continue;
    if (st.phase == Phase::Delivered || st.phase == Phase::Failed || st.phase == Phase::Cancelled) continue;
    fail_subtask(st);
    affected.push_back(st.rec.task);
  }
  for (const TaskId id : affected) check_satisfiable(tasks_.at(id));

  const auto* hw = std::get_if<HighwayScenario>(&config_.scenario);
  if (!timeline_ && hw != nullptr && hw->population == HighwayScenario::Population::Fixed) {
    schedule_node(make_highway_node(next_node_++, now_));
  }
}

void Simulator::fail_subtask(SubtaskRuntime& st) {
  st.phase = Phase::Failed;
  const auto& task = tasks_.at(st.rec.task).task;
  const double d_fail = task.deadline ? *task.deadline : 2.0 * config_.alto.d_ref * st.rec.bits;
  DelayBreakdown observed;
  observed.total = d_fail;
  learner_.update(st.rec.node, observed, st.rec.bits);
  log("SubtaskFailed", st.rec.id);
}

void Simulator::check_satisfiable(TaskRuntime& tr) {
  if (result_.tasks[tr.record].outcome != TaskOutcome::InFlight || tr.doomed) return;
  std::uint32_t alive = 0;
  for (const auto id : tr.subtasks) {
    const Phase p = subtasks_[id].phase;
    if (p != Phase::Failed && p != Phase::Delivered && p != Phase::Cancelled) ++alive;
  }
  if (tr.received + alive >= tr.required) return;
  if (config_.reoffload_on_departure) {
    if (!dispatch(tr)) deferred_.push_back(tr.task.id);
    return;
  }
  if (tr.task.deadline) {
    tr.doomed = true;
  } else {
    finish(tr, TaskOutcome::Orphaned);
  }
}

void Simulator::start_next(NodeRuntime& nr) {
  if (nr.computing || nr.queue.empty()) return;
  const auto id = nr.queue.front();
  nr.queue.pop_front();
  auto& st = subtasks_[id];
  st.phase = Phase::Computing;
  nr.computing = id;
  nr.busy_until = now_ + st.compute_time;
  queue_.push(nr.busy_until, event::ComputeDone{id});
}

void Simulator::on_upload_done(std::uint64_t sub) {
  auto& st = subtasks_[sub];
  if (st.phase != Phase::Uploading) return;
  auto& nr = nodes_.at(st.rec.node);
  if (nr.node.depart_time <= now_) handle_node_departure(st.rec.node);
  if (st.phase != Phase::Uploading) return;
  const auto& tr = tasks_.at(st.rec.task);
  if (config_.cancel_stale && result_.tasks[tr.record].outcome != TaskOutcome::InFlight) {
    cancel_subtask(st);
    return;
  }
  const auto& task = tr.task;
  st.compute_time = compute_delay(st.rec.bits, task.intensity, nr.node.cpu_hz);
  st.phase = Phase::Queued;
  nr.queue.push_back(sub);
  log("UploadDone", sub);
  start_next(nr);
}

void Simulator::on_compute_done(std::uint64_t sub) {
  auto& st = subtasks_[sub];
  if (st.phase != Phase::Computing) return;
  auto& nr = nodes_.at(st.rec.node);
  if (nr.node.depart_time <= now_) handle_node_departure(st.rec.node);
  if (st.phase != Phase::Computing) return;
  nr.computing.reset();
  log("ComputeDone", sub);
  start_next(nr);

  const auto& task = tasks_.at(st.rec.task).task;
  double down = 0.0;
  if (task.output_bits > 0.0) {
    const double out_bits = task.output_bits * st.rec.bits / task.input_bits;
    RandomStream rng(options_.seed, "downlink", task.id, st.rec.node + (sub << 40));
    down = sample_upload_delay(out_bits, config_.link, config_.link_success_prob, rng).delay;
  }
  st.phase = Phase::Downloading;
  queue_.push(now_ + down, event::ResultDelivered{sub});
}

void Simulator::on_delivered(std::uint64_t sub) {
  auto& st = subtasks_[sub];
  if (st.phase != Phase::Downloading) return;
  if (nodes_.at(st.rec.node).node.depart_time <= now_) handle_node_departure(st.rec.node);
  if (st.phase != Phase::Downloading) return;
  st.phase = Phase::Delivered;
  st.rec.delivered = now_;
  log("ResultDelivered", sub);

  DelayBreakdown observed;
  observed.total = now_ - st.rec.dispatch_time;
  learner_.update(st.rec.node, observed, st.rec.bits);

  auto& tr = tasks_.at(st.rec.task);
  if (result_.tasks[tr.record].outcome != TaskOutcome::InFlight) return;
  if (std::find(tr.subtasks.begin(), tr.subtasks.end(), sub) == tr.subtasks.end()) return;
  if (++tr.received >= tr.required) finish(tr, TaskOutcome::Completed);
}

void Simulator::on_deadline(TaskId id) {
  // Deadlines are checked after every other event at the same instant, so a
  // result delivered exactly at the deadline still counts.
  if (!queue_.empty() && queue_.top().time == now_) {
    queue_.push(now_, event::DeadlineExpired{id});
    return;
  }
  auto& tr = tasks_.at(id);
  if (result_.tasks[tr.record].outcome != TaskOutcome::InFlight) return;
  finish(tr, TaskOutcome::DeadlineViolated);
  std::erase(deferred_, id);
}

void Simulator::finish(TaskRuntime& tr, TaskOutcome outcome) {
  auto& rec = result_.tasks[tr.record];
  rec.outcome = outcome;
  rec.end_time = now_;
  log(to_string(outcome), tr.task.id);
  if (!config_.cancel_stale) return;
  for (const auto id : tr.subtasks) {
    auto& st = subtasks_[id];
    if (st.phase != Phase::Queued) continue;
    std::erase(nodes_.at(st.rec.node).queue, id);
    cancel_subtask(st);
  }
}

void Simulator::cancel_subtask(SubtaskRuntime& st) {
  st.phase = Phase::Cancelled;
  learner_.withdraw(st.rec.node);
  log("SubtaskCancelled", st.rec.id);
}

double Simulator::expected_delay(NodeId node, double bits, double intensity, double t) const {
  const auto& nr = nodes_.at(node);
  const double up = config_.coding_overhead_s +
                    expected_upload_delay(bits, config_.link, nr.node.link_success_prob);
  double backlog = nr.computing ? std::max(t, nr.busy_until) : t;
  for (const auto id : nr.queue) backlog += subtasks_[id].compute_time;
  const double wait = std::max(0.0, backlog - (t + up));
  double down = 0.0;
  if (config_.workload.output_bits > 0.0) {
    down = expected_upload_delay(config_.workload.output_bits, config_.link, nr.node.link_success_prob);
  }
  return up + wait + compute_delay(bits, intensity, nr.node.cpu_hz) + down;
}

RunResult simulate(const SimConfig& config, const RunOptions& options) {
  return Simulator(config, options).run();
}

}  // namespace vfog
