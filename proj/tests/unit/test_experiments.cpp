#include <doctest.h>

#include <map>

#include "vfog/config.hpp"
#include "vfog/error.hpp"
#include "vfog/experiments.hpp"
#include "vfog/stats.hpp"

using namespace vfog;

namespace {

SimConfig small_learn() {
  return parse_config(R"({"subcommand":"learn","seeds":3,"horizon_s":200,
      "scenario":{"type":"synthetic-highway"},"workload":{"max_tasks":300},
      "variants":["alto/single","random/single"],"metrics":{"window_s":20,"task_window":50,
      "regret_checkpoints":[100,200]}})");
}

}  // namespace

TEST_CASE("windowed_mean_delay") {
  CHECK(windowed_mean_delay({}, 1.0).empty());
  auto one = windowed_mean_delay({{0.5, 0.7}}, 1.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].mean == 0.7);
  CHECK(one[0].count == 1);
  auto two = windowed_mean_delay({{0.1, 0.2}, {0.9, 0.4}, {1.5, 0.6}}, 1.0);
  REQUIRE(two.size() == 2);
  CHECK(*two[0].mean == doctest::Approx(0.3));
  CHECK(*two[1].mean == doctest::Approx(0.6));
  auto gap = windowed_mean_delay({{0.1, 0.2}, {2.5, 0.6}}, 1.0);
  REQUIRE(gap.size() == 3);
  CHECK(gap[1].count == 0);
  CHECK_FALSE(gap[1].mean.has_value());
}

TEST_CASE("stats helpers") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(stats::mean(v) == 2.5);
  CHECK(stats::stddev(v) == doctest::Approx(1.290994));
  const auto ci = stats::mean_ci(v);
  CHECK(ci.low < 2.5);
  CHECK(ci.high > 2.5);
  CHECK(stats::paired_upper(std::vector<double>{1, 1, 1}, std::vector<double>{2, 2, 2}) == -1.0);
}

TEST_CASE("case A report") {
  const auto cfg = small_learn();
  const auto rep = run_case_a(cfg, {.threads = 2, .record_log = false});
  REQUIRE(rep.summaries.size() == 2);
  CHECK(rep.seeds == std::vector<std::uint64_t>{1, 2, 3});
  for (const auto& s : rep.summaries) {
    CHECK(s.counts.conserved());
    CHECK((s.completion_ratio >= 0 && s.completion_ratio <= 1));
    std::uint64_t windowed = 0;
    for (const auto& p : s.series_time) windowed += p.count;
    CHECK(windowed == s.counts.completed);
    windowed = 0;
    for (const auto& p : s.series_task) windowed += p.count;
    CHECK(windowed == s.counts.completed);
    REQUIRE(s.regret.size() == 2);
    CHECK(s.regret[1].mean_regret >= s.regret[0].mean_regret);
  }
  CHECK(rep.find("random/single") != nullptr);
  CHECK(rep.find("ucb1/single") == nullptr);

  SUBCASE("thread count does not change the result") {
    const auto serial = run_case_a(cfg, {.threads = 1, .record_log = false});
    CHECK(to_json(serial) == to_json(rep));
  }
  SUBCASE("serialization round-trips") {
    const std::string text = to_json(rep);
    CHECK(to_json(report_from_json(text)) == text);
    CHECK(series_time_csv(rep).rfind("time_s,policy,mean_delay_s,count\n", 0) == 0);
  }
  SUBCASE("config echo reproduces the run") {
    const auto again = run_case_a(parse_config(rep.config_echo), {.threads = 1, .record_log = false});
    CHECK(to_json(again) == to_json(rep));
  }
}

TEST_CASE("aggregates recomputed from the event log") {
  const auto cfg = small_learn();
  std::vector<RunResult> runs;
  for (const auto seed : seed_list(cfg)) {
    RunOptions o;
    o.seed = seed;
    o.variant = cfg.variants[0];
    o.record_log = true;
    runs.push_back(Simulator(cfg, o).run());
  }
  const auto s = summarize(cfg, runs);
  double sum = 0;
  std::uint64_t completed = 0, released = 0;
  for (const auto& r : runs) {
    std::map<std::uint64_t, double> release;
    for (const auto& e : r.log) {
      if (e.kind == "TaskRelease") {
        release[e.id] = e.time;
        ++released;
      }
      if (e.kind == "completed") {
        sum += e.time - release.at(e.id);
        ++completed;
      }
    }
  }
  CHECK(released == s.counts.released);
  CHECK(completed == s.counts.completed);
  CHECK(sum / static_cast<double>(completed) == doctest::Approx(s.mean_delay).epsilon(1e-12));
}

TEST_CASE("optimal policy on static nodes matches the closed form") {
  // One task at a time on idle nodes: the best node is the fastest.
  const auto cfg = parse_config(R"({"subcommand":"learn","seeds":1,"horizon_s":5000,
      "link":{"link_success_prob":1.0},
      "scenario":{"type":"synthetic-highway","population":"static","static_cpu_hz":[2e9,5e9,3e9]},
      "workload":{"mean_interarrival_s":5,"max_tasks":500},"variants":["optimal/single"]})");
  const auto rep = run(cfg);
  const auto& s = rep.summaries.at(0);
  const double mean_bits = 6e5;
  const double expected = mean_bits / 6e6 + mean_bits * 1000 / 5e9;
  CHECK(s.mean_delay == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("coded sweep") {
  const auto cfg = parse_config(R"J({"subcommand":"coded","seeds":3,"horizon_s":300,
      "scenario":{"type":"synthetic-highway"},"workload":{"max_tasks":400},
      "variants":["alto/single","alto/rep2","alto/mds(3,2)"],"n_fog_sweep":[3,6]})J");
  const auto rep = run_coded_sweep(cfg, {.threads = 2, .record_log = false});
  REQUIRE(rep.summaries.size() == 6);
  CHECK(rep.find("alto/rep2", 6) != nullptr);
  CHECK(rep.find("alto/rep2", 6)->completion_ratio >= rep.find("alto/single", 6)->completion_ratio);
  const std::string csv = completion_csv(rep);
  CHECK(csv.rfind("n_fog,scheme,completion_ratio,ci_low,ci_high\n", 0) == 0);
  CHECK(to_json(report_from_json(to_json(rep))) == to_json(rep));

  SUBCASE("no fallback is a configuration error") {
    auto strict = cfg;
    strict.fallback = false;
    strict.n_fog_sweep = {2};
    CHECK_THROWS_AS(run_coded_sweep(strict), ConfigError);
  }
}

TEST_CASE("case B report") {
  const auto cfg = parse_config(R"({"subcommand":"beta-sweep","seeds":4,
      "scenario":{"type":"beta-rsu","grid_points":5}})");
  const auto rep = run_case_b(cfg, {.threads = 2, .record_log = false});
  REQUIRE(rep.curves.size() == 2);
  CHECK(rep.curves[0].points.size() == 5);
  CHECK(rep.curves[0].points.back().violation_ratio == 1.0);
  CHECK(speed_curve_csv(rep.curves[0]).rfind("speed_mps,violation_ratio,ci_low,ci_high,seeds\n", 0) == 0);
  CHECK(to_json(report_from_json(to_json(rep))) == to_json(rep));
}
