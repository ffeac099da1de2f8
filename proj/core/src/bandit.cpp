#include "vfog/bandit.hpp"

#include <algorithm>
#include <cmath>

#include "vfog/error.hpp"

namespace vfog {

void AltoParams::validate() const {
  if (!(beta0 >= 0.0)) throw InvalidParameter("alto beta0 must be non-negative");
  if (!(w_min >= 0.0) || w_min > 1.0) throw InvalidParameter("alto w_min must lie in [0, 1]");
  if (!(x_min < x_max)) throw InvalidParameter("alto x_min must be below x_max");
  if (!(d_ref > 0.0)) throw InvalidParameter("alto d_ref must be positive");
}

double normalize_workload(double bits, const AltoParams& params) {
  const double x = (bits - params.x_min) / (params.x_max - params.x_min);
  return std::clamp(x, 0.0, 1.0);
}

namespace {

double normalized_delay(const ArmState& arm, const AltoParams& params) {
  return std::min(arm.mean_delay_per_bit / params.d_ref, 1.0);
}

}  // namespace

double alto_index(const ArmState& arm, double t, double x_norm, const AltoParams& params) {
  if (!(t > arm.appear_time)) {
    throw InvalidParameter("alto_index needs t after the arm's appearance time");
  }
  if (arm.n_selected == 0) return -kInf;
  // Low workloads make mistakes cheap, so they carry the larger exploration
  // weight.
  const double weight = params.w_min + (1.0 - params.w_min) * (1.0 - x_norm);
  const double age = t - arm.appear_time + 1.0;
  const double bonus =
      std::sqrt(params.beta0 * weight * std::log(age) / static_cast<double>(arm.n_selected));
  return normalized_delay(arm, params) - bonus;
}

double ucb1_index(const ArmState& arm, std::uint64_t total_selections, const AltoParams& params) {
  if (arm.n_selected == 0) return -kInf;
  const double n_total = static_cast<double>(std::max<std::uint64_t>(total_selections, 1));
  return normalized_delay(arm, params) -
         std::sqrt(2.0 * std::log(n_total) / static_cast<double>(arm.n_selected));
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Alto: return "alto";
    case PolicyKind::Ucb1: return "ucb1";
    case PolicyKind::Random: return "random";
    case PolicyKind::Optimal: return "optimal";
  }
  return "unknown";
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "alto") return PolicyKind::Alto;
  if (name == "ucb1") return PolicyKind::Ucb1;
  if (name == "random") return PolicyKind::Random;
  if (name == "optimal") return PolicyKind::Optimal;
  throw InvalidParameter("unknown policy '" + name + "'");
}

// ---------------------------------------------------------------------------

void RegretLedger::record(double t, NodeId chosen, double chosen_expected, double best_expected) {
  const double inc = std::max(chosen_expected - best_expected, 0.0);
  cumulative_ += inc;
  records_.push_back({t, chosen, chosen_expected, best_expected});
  running_.push_back(cumulative_);
}

double RegretLedger::cumulative_at(std::size_t tasks) const {
  if (tasks == 0 || running_.empty()) return 0.0;
  return running_[std::min(tasks, running_.size()) - 1];
}

void record_regret(RegretLedger& ledger, double chosen_expected, double best_expected, double t,
                   NodeId chosen) {
  ledger.record(t, chosen, chosen_expected, best_expected);
}

// ---------------------------------------------------------------------------

Learner::Learner(PolicyKind kind, AltoParams params) : kind_(kind), params_(params) {
  params_.validate();
}

void Learner::on_node_appear(NodeId node, double t) {
  auto [it, inserted] = arms_.try_emplace(node);
  Slot& s = it->second;
  if (inserted) s.arm.node_id = node;
  s.arm.appear_time = t;
  s.arm.present = true;
}

void Learner::on_node_depart(NodeId node) {
  auto it = arms_.find(node);
  if (it == arms_.end()) throw InternalConsistency("departure of unknown arm");
  it->second.arm.present = false;
}

const ArmState* Learner::arm(NodeId node) const {
  auto it = arms_.find(node);
  return it == arms_.end() ? nullptr : &it->second.arm;
}

std::vector<NodeId> Learner::present_arms() const {
  std::vector<NodeId> out;
  for (const auto& [id, s] : arms_) {
    if (s.arm.present) out.push_back(id);
  }
  return out;
}

std::size_t Learner::present_count() const {
  std::size_t n = 0;
  for (const auto& [id, s] : arms_) n += s.arm.present ? 1 : 0;
  return n;
}

std::vector<std::pair<double, NodeId>> Learner::ranked(const Task& task, double bits, double t,
                                                       const GroundTruth* truth) {
  std::vector<std::pair<double, NodeId>> scores;
  const double x_norm = normalize_workload(task.input_bits, params_);
  for (const auto& [id, s] : arms_) {
    if (!s.arm.present) continue;
    ++index_evaluations_;
    double score = 0.0;
    switch (kind_) {
      case PolicyKind::Alto: {
        if (s.arm.n_selected == 0) {
          score = -kInf;
        } else {
          // An arm re-appearing at exactly the decision instant gets the
          // smallest representable age.
          const double at = t > s.arm.appear_time ? t : std::nextafter(s.arm.appear_time, kInf);
          score = alto_index(s.arm, at, x_norm, params_);
        }
        break;
      }
      case PolicyKind::Ucb1:
        score = ucb1_index(s.arm, total_selections_, params_);
        break;
      case PolicyKind::Optimal:
        if (truth == nullptr) throw InvalidParameter("optimal policy needs ground truth");
        score = truth->expected_delay(id, bits, task.intensity, t);
        break;
      case PolicyKind::Random:
        break;
    }
    scores.emplace_back(score, id);
  }
  // Stable on id order, so ties keep the smallest node id first.
  std::stable_sort(scores.begin(), scores.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return scores;
}

void Learner::mark_selected(NodeId node) {
  ++arms_.at(node).outstanding;
  ++total_selections_;
}

NodeId Learner::select(const Task& task, double t, RandomStream& rng, const GroundTruth* truth) {
  return select_many(task, task.input_bits, t, 1, rng, truth).front();
}

std::vector<NodeId> Learner::select_many(const Task& task, double bits_per_node, double t,
                                         std::size_t k, RandomStream& rng,
                                         const GroundTruth* truth) {
  if (k == 0) return {};
  std::vector<NodeId> chosen;
  if (kind_ == PolicyKind::Random) {
    std::vector<NodeId> pool = present_arms();
    if (pool.empty()) throw NoCandidate("no fog node in range");
    if (pool.size() < k) throw InsufficientCandidates("not enough fog nodes in range");
    // Partial Fisher-Yates: uniform without replacement.
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + rng.index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      chosen.push_back(pool[i]);
    }
  } else {
    const auto scores = ranked(task, bits_per_node, t, truth);
    if (scores.empty()) throw NoCandidate("no fog node in range");
    if (scores.size() < k) throw InsufficientCandidates("not enough fog nodes in range");
    for (std::size_t i = 0; i < k; ++i) chosen.push_back(scores[i].second);
  }
  for (const auto id : chosen) mark_selected(id);
  return chosen;
}

void Learner::update(NodeId node, const DelayBreakdown& observed, double bits) {
  auto it = arms_.find(node);
  if (it == arms_.end() || it->second.outstanding == 0) {
    throw InternalConsistency("update for an arm that was not selected");
  }
  if (!(bits > 0.0)) throw InvalidParameter("update needs positive bits");
  Slot& s = it->second;
  --s.outstanding;
  const double sample = observed.total / bits;
  ++s.arm.n_selected;
  s.arm.mean_delay_per_bit += (sample - s.arm.mean_delay_per_bit) / static_cast<double>(s.arm.n_selected);
}

void Learner::withdraw(NodeId node) {
  auto it = arms_.find(node);
  if (it == arms_.end() || it->second.outstanding == 0) {
    throw InternalConsistency("withdraw for an arm that was not selected");
  }
  --it->second.outstanding;
}

}  // namespace vfog
