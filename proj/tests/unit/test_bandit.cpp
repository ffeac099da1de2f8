#include <doctest.h>

#include <cmath>
#include <map>

#include "vfog/bandit.hpp"
#include "vfog/error.hpp"

using namespace vfog;

namespace {

Task task_of(double bits) {
  Task t;
  t.input_bits = bits;
  return t;
}

// Expected delay of each node is bits * intensity / cpu.
class CpuTruth : public GroundTruth {
 public:
  std::map<NodeId, double> cpu;
  double expected_delay(NodeId node, double bits, double intensity, double) const override {
    return compute_delay(bits, intensity, cpu.at(node));
  }
};

void observe(Learner& l, NodeId node, double per_bit, double bits = 1e6) {
  DelayBreakdown d;
  d.total = per_bit * bits;
  l.update(node, d, bits);
}

// Forces one selection of `node` and feeds back `per_bit`.
void train(Learner& l, NodeId node, double per_bit, double t, RandomStream& rng) {
  while (true) {
    const auto pick = l.select(task_of(1e6), t, rng);
    observe(l, pick, pick == node ? per_bit : 1e-6);
    if (pick == node) return;
  }
}

}  // namespace

TEST_CASE("workload normalization") {
  AltoParams p;
  CHECK(normalize_workload(2e5, p) == 0.0);
  CHECK(normalize_workload(1e6, p) == 1.0);
  CHECK(normalize_workload(6e5, p) == doctest::Approx(0.5));
  CHECK(normalize_workload(1e4, p) == 0.0);
  CHECK(normalize_workload(5e6, p) == 1.0);
}

TEST_CASE("alto index") {
  AltoParams p;
  ArmState a;
  a.n_selected = 4;
  a.mean_delay_per_bit = 5e-7;
  a.appear_time = 10;
  CHECK_THROWS_AS(alto_index(a, 10, 0.5, p), InvalidParameter);
  const double w = p.w_min + (1 - p.w_min) * 0.5;
  CHECK(alto_index(a, 20, 0.5, p) ==
        doctest::Approx(5e-7 / p.d_ref - std::sqrt(w * std::log(11.0) / 4)));

  SUBCASE("beta0 = 0 is greedy") {
    p.beta0 = 0;
    CHECK(alto_index(a, 20, 0.5, p) == doctest::Approx(5e-7 / p.d_ref));
  }
  SUBCASE("fewer selections means a lower index") {
    ArmState b = a;
    b.n_selected = 9;
    CHECK(alto_index(a, 30, 0.3, p) < alto_index(b, 30, 0.3, p));
  }
  SUBCASE("low workload explores more") {
    CHECK(alto_index(a, 30, 0.0, p) < alto_index(a, 30, 1.0, p));
  }
  SUBCASE("untried arm") {
    a.n_selected = 0;
    CHECK(alto_index(a, 20, 0.5, p) == -kInf);
  }
  SUBCASE("normalized delay is capped") {
    p.beta0 = 0;
    a.mean_delay_per_bit = 1.0;
    CHECK(alto_index(a, 20, 0.5, p) == 1.0);
  }
}

TEST_CASE("single present arm is chosen by every policy") {
  CpuTruth truth;
  truth.cpu[5] = 3e9;
  for (auto kind : {PolicyKind::Alto, PolicyKind::Ucb1, PolicyKind::Random, PolicyKind::Optimal}) {
    Learner l(kind, AltoParams{});
    l.on_node_appear(5, 0);
    RandomStream rng(1, "test.single");
    CHECK(l.select(task_of(5e5), 1, rng, &truth) == 5);
  }
}

TEST_CASE("empty candidate set") {
  Learner l(PolicyKind::Alto, AltoParams{});
  RandomStream rng(1, "test.empty");
  CHECK_THROWS_AS(l.select(task_of(5e5), 1, rng), NoCandidate);
  l.on_node_appear(1, 0);
  l.on_node_depart(1);
  CHECK_THROWS_AS(l.select(task_of(5e5), 1, rng), NoCandidate);
}

TEST_CASE("optimal picks the faster node") {
  CpuTruth truth;
  truth.cpu[1] = 2e9;
  truth.cpu[2] = 5e9;
  Learner l(PolicyKind::Optimal, AltoParams{});
  l.on_node_appear(1, 0);
  l.on_node_appear(2, 0);
  RandomStream rng(1, "test.optimal");
  CHECK(l.select(task_of(5e5), 1, rng, &truth) == 2);
  CHECK_THROWS_AS(l.select(task_of(5e5), 1, rng), InvalidParameter);
}

TEST_CASE("random is uniform") {
  Learner l(PolicyKind::Random, AltoParams{});
  for (NodeId id = 1; id <= 4; ++id) l.on_node_appear(id, 0);
  RandomStream rng(2, "test.uniform");
  std::map<NodeId, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[l.select(task_of(5e5), 1, rng)];
  for (const auto& [id, c] : counts) CHECK(std::abs(c / double(n) - 0.25) < 0.01);

  SUBCASE("without replacement") {
    for (int i = 0; i < 200; ++i) {
      auto pick = l.select_many(task_of(5e5), 5e5, 1, 3, rng);
      std::sort(pick.begin(), pick.end());
      CHECK(std::adjacent_find(pick.begin(), pick.end()) == pick.end());
    }
    CHECK_THROWS_AS(l.select_many(task_of(5e5), 5e5, 1, 5, rng), InsufficientCandidates);
  }
}

TEST_CASE("alto and ucb1 selection") {
  RandomStream rng(3, "test.alto");
  for (auto kind : {PolicyKind::Alto, PolicyKind::Ucb1}) {
    Learner l(kind, AltoParams{});
    l.on_node_appear(1, 0);
    l.on_node_appear(2, 0);
    SUBCASE("untried arms come first, smallest id on ties") {
      CHECK(l.select(task_of(5e5), 1, rng) == 1);
      observe(l, 1, 2e-7);
      CHECK(l.select(task_of(5e5), 2, rng) == 2);
      observe(l, 2, 2e-7);
      l.on_node_appear(3, 3);
      CHECK(l.select(task_of(5e5), 4, rng) == 3);
    }
    SUBCASE("each present arm is scored once per decision") {
      l.on_node_appear(3, 0);
      const auto before = l.index_evaluations();
      l.select(task_of(5e5), 1, rng);
      CHECK(l.index_evaluations() - before == 3);
      l.on_node_depart(2);
      const auto mid = l.index_evaluations();
      l.select(task_of(5e5), 2, rng);
      CHECK(l.index_evaluations() - mid == 2);
    }
  }
}

TEST_CASE("greedy alto exploits the better arm") {
  AltoParams p;
  p.beta0 = 0;
  Learner l(PolicyKind::Alto, p);
  l.on_node_appear(1, 0);
  l.on_node_appear(2, 0);
  RandomStream rng(4, "test.greedy");
  train(l, 1, 5e-7, 1, rng);
  train(l, 2, 3e-7, 2, rng);
  for (int i = 0; i < 20; ++i) {
    const auto pick = l.select(task_of(5e5), 3 + i, rng);
    CHECK(pick == 2);
    observe(l, pick, 3e-7);
  }
}

TEST_CASE("index ranking is scale invariant") {
  RandomStream rng(6, "test.scale");
  for (int trial = 0; trial < 200; ++trial) {
    AltoParams p;
    std::vector<ArmState> arms(5);
    for (std::size_t i = 0; i < arms.size(); ++i) {
      arms[i].n_selected = 1 + rng.index(20);
      arms[i].mean_delay_per_bit = rng.uniform(1e-7, 1e-6);
      arms[i].appear_time = rng.uniform(0, 50);
    }
    const double c = rng.uniform(0.1, 10);
    AltoParams q = p;
    q.d_ref *= c;
    std::size_t best_p = 0, best_q = 0;
    for (std::size_t i = 1; i < arms.size(); ++i) {
      ArmState s = arms[i];
      s.mean_delay_per_bit *= c;
      ArmState bs = arms[best_q];
      bs.mean_delay_per_bit *= c;
      if (alto_index(arms[i], 100, 0.4, p) < alto_index(arms[best_p], 100, 0.4, p)) best_p = i;
      if (alto_index(s, 100, 0.4, q) < alto_index(bs, 100, 0.4, q)) best_q = i;
    }
    CHECK(best_p == best_q);
  }
}

TEST_CASE("updates") {
  Learner l(PolicyKind::Alto, AltoParams{});
  l.on_node_appear(1, 0);
  CHECK_THROWS_AS(observe(l, 1, 1e-7), InternalConsistency);
  RandomStream rng(5, "test.update");
  l.select(task_of(5e5), 1, rng);
  DelayBreakdown d;
  d.total = 0.3;
  l.update(1, d, 6e5);
  CHECK(l.arm(1)->mean_delay_per_bit == 0.3 / 6e5);
  l.select(task_of(5e5), 2, rng);
  observe(l, 1, 7e-7);
  CHECK(l.arm(1)->mean_delay_per_bit == doctest::Approx((0.3 / 6e5 + 7e-7) / 2).epsilon(1e-15));
  CHECK(l.arm(1)->n_selected == 2);
  CHECK_THROWS_AS(l.withdraw(1), InternalConsistency);

  SUBCASE("re-appearance keeps statistics") {
    l.on_node_depart(1);
    CHECK(l.present_count() == 0);
    l.on_node_appear(1, 50);
    CHECK(l.arm(1)->n_selected == 2);
    CHECK(l.arm(1)->appear_time == 50);
  }
}

TEST_CASE("regret ledger") {
  RegretLedger ledger;
  record_regret(ledger, 0.4, 0.4);
  CHECK(ledger.cumulative() == 0.0);
  record_regret(ledger, 0.5, 0.3);
  record_regret(ledger, 0.2, 0.3);
  CHECK(ledger.cumulative() == doctest::Approx(0.2));
  CHECK(ledger.cumulative_at(1) == 0.0);
  CHECK(ledger.cumulative_at(2) == doctest::Approx(0.2));
  double prev = 0;
  for (std::size_t i = 1; i <= ledger.size(); ++i) {
    CHECK(ledger.cumulative_at(i) >= prev);
    prev = ledger.cumulative_at(i);
  }
  CHECK(parse_policy("ucb1") == PolicyKind::Ucb1);
  CHECK(to_string(PolicyKind::Optimal) == "optimal");
  CHECK_THROWS_AS(parse_policy("greedy"), InvalidParameter);
}
