#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfog/core.hpp"
#include "vfog/random.hpp"

namespace vfog {

// Per-candidate learning statistics.
struct ArmState {
  NodeId node_id = 0;
  std::uint64_t n_selected = 0;
  double mean_delay_per_bit = 0.0;  // seconds per bit, valid once n_selected > 0
  double appear_time = 0.0;
  bool present = true;
};

struct AltoParams {
  // Worst-case per-bit delay used to normalize empirical delays: the largest
  // workload on the slowest CPU (5e-7 s/bit) plus a pessimistic upload
  // allowance.
  static constexpr double kDefaultDelayRef = 1.1e-6;

  double beta0 = 1.0;
  double w_min = 0.1;
  double x_min = 2e5;
  double x_max = 1e6;
  double d_ref = kDefaultDelayRef;

  void validate() const;
};

double normalize_workload(double bits, const AltoParams& params);

// Lower confidence bound used by ALTO; smaller is better. Untried arms score
// -infinity so they are always tried first.
double alto_index(const ArmState& arm, double t, double x_norm, const AltoParams& params);

// Classic UCB1 in delay (cost) form with the global selection count.
double ucb1_index(const ArmState& arm, std::uint64_t total_selections, const AltoParams& params);

enum class PolicyKind { Alto, Ucb1, Random, Optimal };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

// Genie access to true expected delays, used by Optimal and for regret.
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;
  virtual double expected_delay(NodeId node, double bits, double intensity, double t) const = 0;
};

struct RegretRecord {
  double t = 0.0;
  NodeId chosen = 0;
  double chosen_expected = 0.0;
  double best_expected = 0.0;
};

class RegretLedger {
 public:
  void record(double t, NodeId chosen, double chosen_expected, double best_expected);
  double cumulative() const { return cumulative_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<RegretRecord>& records() const { return records_; }
  // Cumulative regret after the first `tasks` decisions.
  double cumulative_at(std::size_t tasks) const;

 private:
  std::vector<RegretRecord> records_;
  std::vector<double> running_;
  double cumulative_ = 0.0;
};

// Appends max(chosen - best, 0).
void record_regret(RegretLedger& ledger, double chosen_expected, double best_expected,
                   double t = 0.0, NodeId chosen = 0);

// A client's offloading learner. Tracks the volatile arm set and picks fog
// nodes for each task according to one policy.
class Learner {
 public:
  Learner(PolicyKind kind, AltoParams params);

  PolicyKind kind() const { return kind_; }
  const AltoParams& params() const { return params_; }

  // A node that appears again keeps its statistics and gets a fresh
  // appearance time.
  void on_node_appear(NodeId node, double t);
  void on_node_depart(NodeId node);

  // Picks one present arm. Throws NoCandidate when no arm is present.
  NodeId select(const Task& task, double t, RandomStream& rng,
                const GroundTruth* truth = nullptr);

  // Picks `k` distinct present arms, best-ranked first. Random samples
  // uniformly without replacement.
  std::vector<NodeId> select_many(const Task& task, double bits_per_node, double t,
                                  std::size_t k, RandomStream& rng,
                                  const GroundTruth* truth = nullptr);

  // Feeds back the delay observed for `bits` bits offloaded to `node`.
  // Only valid for arms with an outstanding selection.
  void update(NodeId node, const DelayBreakdown& observed, double bits);

  // Drops an outstanding selection whose work was discarded before it
  // produced an observation.
  void withdraw(NodeId node);

  const ArmState* arm(NodeId node) const;
  std::vector<NodeId> present_arms() const;
  std::size_t present_count() const;
  std::uint64_t total_selections() const { return total_selections_; }

  // Number of index evaluations performed so far; instrumentation for the
  // linear-complexity check.
  std::uint64_t index_evaluations() const { return index_evaluations_; }

 private:
  struct Slot {
    ArmState arm;
    std::uint64_t outstanding = 0;
  };

  std::vector<std::pair<double, NodeId>> ranked(const Task& task, double bits, double t,
                                                const GroundTruth* truth);
  void mark_selected(NodeId node);

  PolicyKind kind_;
  AltoParams params_;
  std::map<NodeId, Slot> arms_;
  std::uint64_t total_selections_ = 0;
  std::uint64_t index_evaluations_ = 0;
};

}  // namespace vfog
