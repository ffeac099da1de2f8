#include <benchmark/benchmark.h>

#include "vfog/bandit.hpp"
#include "vfog/beta.hpp"
#include "vfog/coding.hpp"
#include "vfog/config.hpp"
#include "vfog/engine.hpp"
#include "vfog/random.hpp"

using namespace vfog;

static void BM_EventQueue(benchmark::State& state) {
  RandomStream rng(1, "bench.queue");
  std::vector<double> times(static_cast<std::size_t>(state.range(0)));
  for (auto& t : times) t = rng.uniform() * 1000;
  for (auto _ : state) {
    EventQueue q;
    for (std::size_t i = 0; i < times.size(); ++i) q.push(times[i], event::TaskRelease{i});
    while (!q.empty()) benchmark::DoNotOptimize(q.pop());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EventQueue)->Range(1 << 10, 1 << 16);

// Selection cost should grow linearly with the number of present arms.
static void BM_AltoSelect(benchmark::State& state) {
  Learner learner(PolicyKind::Alto, AltoParams{});
  const auto arms = static_cast<NodeId>(state.range(0));
  for (NodeId n = 0; n < arms; ++n) learner.on_node_appear(n, 0.0);
  RandomStream rng(2, "bench.alto");
  Task task;
  task.input_bits = 6e5;
  double t = 1.0;
  for (NodeId n = 0; n < arms; ++n) {
    const auto id = learner.select(task, t, rng);
    learner.update(id, DelayBreakdown::of(0.1, 0.2 + 0.01 * static_cast<double>(id), 0.0), task.input_bits);
  }
  for (auto _ : state) {
    t += 0.5;
    const NodeId id = learner.select(task, t, rng);
    benchmark::DoNotOptimize(id);
    learner.withdraw(id);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AltoSelect)->RangeMultiplier(2)->Range(4, 512)->Complexity(benchmark::oN);

static void BM_CompletionTime(benchmark::State& state) {
  RandomStream rng(3, "bench.coding");
  const auto scheme = CodingScheme::mds(6, 3);
  std::vector<FinishTime> finish(6);
  for (auto& f : finish) f = rng.uniform();
  finish[2].reset();
  for (auto _ : state) benchmark::DoNotOptimize(completion_time(finish, scheme));
}
BENCHMARK(BM_CompletionTime);

static void BM_BruteForceCompletion(benchmark::State& state) {
  RandomStream rng(3, "bench.coding");
  const auto scheme = CodingScheme::mds(6, 3);
  std::vector<FinishTime> finish(6);
  for (auto& f : finish) f = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_completion(finish, scheme));
}
BENCHMARK(BM_BruteForceCompletion);

static void BM_DpOptimal(benchmark::State& state) {
  DpInstance in;
  for (int i = 0; i < state.range(0); ++i) in.tasks.push_back({0, 8.0});
  in.lambda = 0.5;
  in.mu = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(dp_optimal(in));
}
BENCHMARK(BM_DpOptimal)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_SimulatorRun(benchmark::State& state) {
  const auto config = parse_config(R"({"subcommand":"learn","scenario":{"type":"synthetic-highway"},
    "workload":{"max_tasks":5000}})");
  RunOptions o;
  o.seed = 1;
  o.variant = config.variants.front();
  for (auto _ : state) benchmark::DoNotOptimize(Simulator(config, o).run());
}
BENCHMARK(BM_SimulatorRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
