#include <algorithm>
#include <cmath>
#include <functional>

#include "vfog/beta.hpp"
#include "vfog/error.hpp"

namespace vfog {

double DpInstance::horizon() const {
  double h = 0.0;
  for (const auto& t : tasks) h = std::max(h, t.residual_deadline);
  return h;
}

double DpInstance::step() const { return time_step > 0.0 ? time_step : 1e-3 * horizon(); }

double discretization_bound(const DpInstance& instance) {
  const double n = static_cast<double>(instance.tasks.size());
  const double rate = instance.lambda + n * static_cast<double>(instance.cap) * instance.mu;
  const double dt = instance.step();
  return n * (rate * rate * instance.horizon() * dt + rate * dt);
}

std::uint32_t DpSolution::encode(const std::vector<int>& digits) const {
  std::uint32_t code = 0;
  for (std::size_t i = digits.size(); i-- > 0;) code = code * base_ + static_cast<std::uint32_t>(digits[i]);
  return code;
}

std::vector<int> DpSolution::decode(std::uint32_t code) const {
  std::vector<int> digits(tasks_);
  for (std::uint32_t i = 0; i < tasks_; ++i) {
    digits[i] = static_cast<int>(code % base_);
    code /= base_;
  }
  return digits;
}

std::uint8_t DpSolution::optimal_actions(std::uint32_t step, std::uint32_t state) const {
  if (step >= steps + 1 || state >= state_count_) throw InvalidParameter("DP cell out of range");
  return masks_[static_cast<std::size_t>(step) * state_count_ + state];
}

namespace {

constexpr double kTie = 1e-12;

// Shared discretized kernel. Digits per task: 0 = gone, c + 1 = alive with
// c replicas.
struct Kernel {
  std::uint32_t n = 0;
  std::uint32_t cap = 0;
  std::uint32_t base = 0;
  std::uint32_t states = 0;
  std::uint32_t steps = 0;  // K: every deadline step is <= K
  double p_arrival = 0.0;
  double p_service = 0.0;  // per replica per step
  std::vector<std::uint32_t> deadline_step;
  std::vector<std::uint32_t> pow;

  explicit Kernel(const DpInstance& inst) {
    if (inst.tasks.size() > DpInstance::kMaxTasks) {
      throw SizeLimit("DP oracle supports at most 3 pending tasks");
    }
    if (inst.cap == 0 || inst.cap > DpInstance::kMaxCap) {
      throw SizeLimit("DP oracle supports replication caps 1..4");
    }
    if (!(inst.lambda >= 0.0) || !(inst.mu >= 0.0)) {
      throw InvalidParameter("DP rates must be non-negative");
    }
    n = static_cast<std::uint32_t>(inst.tasks.size());
    cap = inst.cap;
    base = cap + 2;
    states = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      pow.push_back(states);
      states *= base;
    }
    if (n == 0) return;
    const double h = inst.horizon();
    const double dt = inst.step();
    if (!(h > 0.0)) throw InvalidParameter("DP deadlines must be positive");
    if (dt > 1e-3 * h * (1.0 + 1e-9)) {
      throw InvalidParameter("DP time step must not exceed 1e-3 of the horizon");
    }
    p_arrival = inst.lambda * dt;
    p_service = inst.mu * dt;
    if (p_arrival + n * cap * p_service > 0.1) {
      throw InvalidParameter("DP time step too coarse for one event per step");
    }
    for (const auto& t : inst.tasks) {
      if (t.replication_count > cap) throw InvalidParameter("initial replication count above cap");
      deadline_step.push_back(static_cast<std::uint32_t>(std::max<long long>(1, std::llround(t.residual_deadline / dt))));
    }
    steps = *std::max_element(deadline_step.begin(), deadline_step.end());
  }

  int digit(std::uint32_t s, std::uint32_t i) const { return static_cast<int>(s / pow[i] % base); }
  std::uint32_t with(std::uint32_t s, std::uint32_t i, int d) const {
    return s - static_cast<std::uint32_t>(digit(s, i)) * pow[i] + static_cast<std::uint32_t>(d) * pow[i];
  }

  // Drops tasks whose deadline step has come.
  std::uint32_t expire(std::uint32_t s, std::uint32_t k, double& violations) const {
    violations = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (digit(s, i) > 0 && deadline_step[i] <= k) {
        violations += 1.0;
        s = with(s, i, 0);
      }
    }
    return s;
  }

  bool assignable(std::uint32_t s, std::uint32_t i) const {
    const int d = digit(s, i);
    return d > 0 && static_cast<std::uint32_t>(d - 1) < cap;
  }

  // BETA's target: fewest replicas, earliest deadline, lowest index.
  int beta_choice(std::uint32_t s) const {
    int best = -1;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!assignable(s, i)) continue;
      if (best < 0) {
        best = static_cast<int>(i);
        continue;
      }
      const auto b = static_cast<std::uint32_t>(best);
      const int ci = digit(s, i), cb = digit(s, b);
      if (ci < cb || (ci == cb && deadline_step[i] < deadline_step[b])) best = static_cast<int>(i);
    }
    return best;
  }

  // Expected next-step value given the chosen value of an arrival.
  double continuation(std::uint32_t s, double arrival_value, const std::vector<double>& next) const {
    double stay = 1.0 - p_arrival;
    double v = p_arrival * arrival_value;
    for (std::uint32_t i = 0; i < n; ++i) {
      const int d = digit(s, i);
      if (d <= 1) continue;  // gone, or alive without replicas
      const double p = static_cast<double>(d - 1) * p_service;
      v += p * next[with(s, i, 0)];
      stay -= p;
    }
    return v + stay * next[s];
  }

  std::uint32_t initial(const DpInstance& inst) const {
    std::uint32_t s = 0;
    for (std::uint32_t i = 0; i < n; ++i) s += (inst.tasks[i].replication_count + 1) * pow[i];
    return s;
  }
};

// Backward induction. With `follow_beta` every arrival goes to BETA's target;
// otherwise the best target is taken and the optimal set is written to
// `masks`.
double backward(const Kernel& kr, std::uint32_t s0, bool follow_beta,
                std::vector<std::uint8_t>* masks) {
  std::vector<double> next(kr.states, 0.0), cur(kr.states, 0.0);
  if (masks) masks->assign(static_cast<std::size_t>(kr.steps + 1) * kr.states, 0);
  for (std::uint32_t k = kr.steps + 1; k-- > 0;) {
    for (std::uint32_t s = 0; s < kr.states; ++s) {
      double viol = 0.0;
      const std::uint32_t s1 = kr.expire(s, k, viol);
      if (s1 == 0 || k == kr.steps) {
        cur[s] = viol;
        continue;
      }
      double arrival = next[s1];
      if (follow_beta) {
        const int b = kr.beta_choice(s1);
        if (b >= 0) arrival = next[kr.with(s1, static_cast<std::uint32_t>(b), kr.digit(s1, static_cast<std::uint32_t>(b)) + 1)];
      } else {
        double best = kInf;
        double q[DpInstance::kMaxTasks] = {kInf, kInf, kInf};
        for (std::uint32_t i = 0; i < kr.n; ++i) {
          if (!kr.assignable(s1, i)) continue;
          q[i] = next[kr.with(s1, i, kr.digit(s1, i) + 1)];
          best = std::min(best, q[i]);
        }
        if (best < kInf) {
          arrival = best;
          if (masks) {
            std::uint8_t m = 0;
            for (std::uint32_t i = 0; i < kr.n; ++i) {
              if (q[i] <= best + kTie * std::max(1.0, std::abs(best))) m |= static_cast<std::uint8_t>(1U << i);
            }
            (*masks)[static_cast<std::size_t>(k) * kr.states + s1] = m;
          }
        }
      }
      cur[s] = viol + kr.continuation(s1, arrival, next);
    }
    std::swap(cur, next);
  }
  return next[s0];
}

}  // namespace

DpSolution dp_optimal(const DpInstance& instance) {
  const Kernel kr(instance);
  DpSolution sol;
  sol.base_ = kr.base;
  sol.tasks_ = kr.n;
  sol.state_count_ = kr.states;
  sol.steps = kr.steps;
  sol.initial_ = kr.initial(instance);
  sol.bound = discretization_bound(instance);
  if (kr.n == 0) {
    sol.masks_.assign(kr.states, 0);
    return sol;
  }
  sol.value = backward(kr, sol.initial_, false, &sol.masks_);
  return sol;
}

double dp_evaluate_beta(const DpInstance& instance) {
  const Kernel kr(instance);
  if (kr.n == 0) return 0.0;
  return backward(kr, kr.initial(instance), true, nullptr);
}

Agreement beta_agreement(const DpInstance& instance, const DpSolution& solution) {
  const Kernel kr(instance);
  Agreement out;
  if (kr.n == 0 || kr.p_arrival == 0.0) return out;
  // Forward reachability over every transition with positive probability.
  std::vector<std::uint8_t> reach(kr.states, 0), upcoming(kr.states, 0);
  reach[solution.initial_state()] = 1;
  for (std::uint32_t k = 0; k < kr.steps; ++k) {
    std::fill(upcoming.begin(), upcoming.end(), 0);
    for (std::uint32_t s = 0; s < kr.states; ++s) {
      if (!reach[s]) continue;
      double viol = 0.0;
      const std::uint32_t s1 = kr.expire(s, k, viol);
      if (s1 == 0) continue;
      upcoming[s1] = 1;
      const int b = kr.beta_choice(s1);
      if (b >= 0) {
        ++out.cells;
        const auto mask = solution.optimal_actions(k, s1);
        if (mask >> b & 1U) ++out.agree;
      }
      for (std::uint32_t i = 0; i < kr.n; ++i) {
        const int d = kr.digit(s1, i);
        if (kr.assignable(s1, i)) upcoming[kr.with(s1, i, d + 1)] = 1;
        if (d > 1 && kr.p_service > 0.0) upcoming[kr.with(s1, i, 0)] = 1;
      }
    }
    std::swap(reach, upcoming);
  }
  return out;
}

}  // namespace vfog
