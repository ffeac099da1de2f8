#include "vfog/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "vfog/config.hpp"
#include "vfog/error.hpp"
#include "vfog/stats.hpp"

namespace vfog {

std::vector<SeriesPoint> windowed_mean_delay(const std::vector<TimedDelay>& events, double window) {
  if (!(window > 0.0)) throw InvalidParameter("window must be positive");
  std::vector<SeriesPoint> out;
  if (events.empty()) return out;
  double latest = 0.0;
  for (const auto& e : events) latest = std::max(latest, e.time);
  const auto windows = static_cast<std::size_t>(std::floor(latest / window)) + 1;
  std::vector<double> sums(windows, 0.0);
  std::vector<std::uint64_t> counts(windows, 0);
  for (const auto& e : events) {
    const auto w = std::min(windows - 1, static_cast<std::size_t>(std::floor(std::max(e.time, 0.0) / window)));
    sums[w] += e.delay;
    ++counts[w];
  }
  for (std::size_t w = 0; w < windows; ++w) {
    SeriesPoint p;
    p.window_end = static_cast<double>(w + 1) * window;
    p.count = counts[w];
    if (counts[w] > 0) p.mean = sums[w] / static_cast<double>(counts[w]);
    out.push_back(p);
  }
  return out;
}

const PolicySummary* MetricsReport::find(const std::string& label,
                                         std::optional<std::uint32_t> n_fog) const {
  for (const auto& s : summaries) {
    if (s.label == label && s.n_fog == n_fog) return &s;
  }
  return nullptr;
}

std::vector<std::uint64_t> seed_list(const SimConfig& config) {
  std::vector<std::uint64_t> out;
  for (std::uint32_t i = 0; i < config.seeds; ++i) out.push_back(config.seed + i);
  return out;
}

PolicySummary summarize(const SimConfig& config, const std::vector<RunResult>& runs) {
  PolicySummary s;
  if (runs.empty()) return s;
  s.label = runs.front().variant.label();
  double delay_sum = 0.0;
  std::vector<TimedDelay> by_time, by_task;
  for (const auto& r : runs) {
    s.counts.released += r.counts.released;
    s.counts.completed += r.counts.completed;
    s.counts.violated += r.counts.violated;
    s.counts.orphaned += r.counts.orphaned;
    s.counts.in_flight += r.counts.in_flight;
    s.decisions += r.decisions;
    s.index_evaluations += r.index_evaluations;

    double seed_sum = 0.0, tail_sum = 0.0;
    std::uint64_t seed_n = 0, tail_n = 0;
    const std::size_t tail_start = r.tasks.size() - r.tasks.size() / 5;
    for (std::size_t i = 0; i < r.tasks.size(); ++i) {
      const auto& t = r.tasks[i];
      if (t.outcome != TaskOutcome::Completed) continue;
      const double d = t.delay();
      seed_sum += d;
      ++seed_n;
      if (i >= tail_start) {
        tail_sum += d;
        ++tail_n;
      }
      by_time.push_back({t.end_time, d});
      by_task.push_back({static_cast<double>(t.id), d});
    }
    delay_sum += seed_sum;
    s.per_seed_mean_delay.push_back(seed_n ? seed_sum / static_cast<double>(seed_n) : 0.0);
    s.per_seed_tail_delay.push_back(tail_n ? tail_sum / static_cast<double>(tail_n) : 0.0);
    const auto resolved = r.counts.released - r.counts.in_flight;
    s.per_seed_completion.push_back(
        resolved ? static_cast<double>(r.counts.completed) / static_cast<double>(resolved) : 0.0);
  }
  const auto resolved = s.counts.released - s.counts.in_flight;
  s.mean_delay = s.counts.completed ? delay_sum / static_cast<double>(s.counts.completed) : 0.0;
  s.completion_ratio = resolved ? static_cast<double>(s.counts.completed) / static_cast<double>(resolved) : 0.0;
  s.violation_ratio = resolved ? static_cast<double>(s.counts.violated) / static_cast<double>(resolved) : 0.0;
  const auto ci = stats::mean_ci(s.per_seed_completion);
  s.completion_ci_low = std::clamp(ci.low, 0.0, 1.0);
  s.completion_ci_high = std::clamp(ci.high, 0.0, 1.0);

  for (const auto cp : config.metrics.regret_checkpoints) {
    RegretCheckpoint rc;
    rc.tasks = cp;
    bool reached = true;
    for (const auto& r : runs) {
      if (r.regret.size() < cp) reached = false;
      rc.per_seed.push_back(r.regret.cumulative_at(cp));
    }
    if (!reached) continue;
    rc.mean_regret = stats::mean(rc.per_seed);
    s.regret.push_back(std::move(rc));
  }

  // Pool completions of all seeds into shared windows.
  s.series_time = windowed_mean_delay(by_time, config.metrics.window_s);
  s.series_task = windowed_mean_delay(by_task, static_cast<double>(config.metrics.task_window));
  for (auto& p : s.series_task) p.window_end -= 1.0;  // last task index of the window
  return s;
}

namespace {

std::vector<RunResult> run_seeds(const SimConfig& config, const Variant& variant,
                                 std::optional<std::uint32_t> n_fog,
                                 const ExperimentOptions& options) {
  const auto seeds = seed_list(config);
  return parallel_map<RunResult>(seeds.size(), options.threads, [&](std::size_t i) {
    RunOptions o;
    o.seed = seeds[i];
    o.variant = variant;
    o.n_fog = n_fog;
    o.record_log = options.record_log;
    return Simulator(config, o).run();
  });
}

MetricsReport header(const SimConfig& config) {
  MetricsReport r;
  r.subcommand = config.subcommand;
  r.config_echo = config_to_json(config);
  r.seeds = seed_list(config);
  return r;
}

}  // namespace

MetricsReport run(const SimConfig& config) {
  config.validate();
  MetricsReport r = header(config);
  r.seeds = {config.seed};
  RunOptions o;
  o.seed = config.seed;
  if (!config.variants.empty()) o.variant = config.variants.front();
  const RunResult result = Simulator(config, o).run();
  r.summaries.push_back(summarize(config, {result}));
  return r;
}

MetricsReport run_case_a(const SimConfig& config, const ExperimentOptions& options) {
  config.validate();
  if (config.variants.empty()) throw ConfigError("variants must not be empty");
  MetricsReport r = header(config);
  for (const auto& v : config.variants) {
    r.summaries.push_back(summarize(config, run_seeds(config, v, std::nullopt, options)));
  }
  return r;
}

MetricsReport run_coded_sweep(const SimConfig& config, const ExperimentOptions& options) {
  config.validate();
  if (config.variants.empty()) throw ConfigError("variants must not be empty");
  if (config.n_fog_sweep.empty()) throw ConfigError("n_fog_sweep must not be empty");
  MetricsReport r = header(config);
  for (const auto n : config.n_fog_sweep) {
    for (const auto& v : config.variants) {
      PolicySummary s = summarize(config, run_seeds(config, v, n, options));
      s.n_fog = n;
      r.summaries.push_back(std::move(s));
    }
  }
  return r;
}

MetricsReport run_case_b(const SimConfig& config, const ExperimentOptions& options) {
  config.validate();
  const auto* beta = std::get_if<BetaScenario>(&config.scenario);
  if (beta == nullptr) throw ConfigError("scenario.type must be beta-rsu");
  MetricsReport r = header(config);
  const TaskStream stream{beta->task_rate_hz, config.horizon};
  const auto seeds = seed_list(config);
  const auto grid = beta->speed_grid();
  for (const auto& name : beta->policies) {
    const RsuPolicy policy = parse_rsu_policy(name);
    // One grid point per job; each point is seed-ordered internally.
    auto points = parallel_map<CurvePoint>(grid.size(), options.threads, [&](std::size_t i) {
      BetaScenario one = *beta;
      one.speeds = {grid[i]};
      return violation_vs_speed(beta->road, one, stream, policy, seeds).front();
    });
    r.curves.push_back({name, std::move(points)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using ojson = nlohmann::ordered_json;

ojson series_json(const std::vector<SeriesPoint>& series) {
  ojson a = ojson::array();
  for (const auto& p : series) {
    ojson j;
    j["window_end"] = p.window_end;
    j["mean"] = p.mean ? ojson(*p.mean) : ojson(nullptr);
    j["count"] = p.count;
    a.push_back(j);
  }
  return a;
}

std::vector<SeriesPoint> series_from(const ojson& a) {
  std::vector<SeriesPoint> out;
  for (const auto& j : a) {
    SeriesPoint p;
    p.window_end = j.at("window_end").get<double>();
    if (!j.at("mean").is_null()) p.mean = j.at("mean").get<double>();
    p.count = j.at("count").get<std::uint64_t>();
    out.push_back(p);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_json(const MetricsReport& report) {
  ojson root;
  root["subcommand"] = report.subcommand;
  root["config"] = ojson::parse(report.config_echo.empty() ? "null" : report.config_echo);
  root["seeds"] = report.seeds;
  ojson summaries = ojson::array();
  for (const auto& s : report.summaries) {
    ojson j;
    j["label"] = s.label;
    j["n_fog"] = s.n_fog ? ojson(*s.n_fog) : ojson(nullptr);
    j["counts"] = {{"released", s.counts.released},
                   {"completed", s.counts.completed},
                   {"violated", s.counts.violated},
                   {"orphaned", s.counts.orphaned},
                   {"in_flight", s.counts.in_flight}};
    j["mean_delay_s"] = s.mean_delay;
    j["completion_ratio"] = s.completion_ratio;
    j["violation_ratio"] = s.violation_ratio;
    j["completion_ci"] = {s.completion_ci_low, s.completion_ci_high};
    j["per_seed_mean_delay_s"] = s.per_seed_mean_delay;
    j["per_seed_tail_delay_s"] = s.per_seed_tail_delay;
    j["per_seed_completion"] = s.per_seed_completion;
    ojson regret = ojson::array();
    for (const auto& rc : s.regret) {
      regret.push_back({{"tasks", rc.tasks}, {"mean_regret_s", rc.mean_regret}, {"per_seed", rc.per_seed}});
    }
    j["regret"] = regret;
    j["decisions"] = s.decisions;
    j["index_evaluations"] = s.index_evaluations;
    j["series_time"] = series_json(s.series_time);
    j["series_task"] = series_json(s.series_task);
    summaries.push_back(j);
  }
  root["summaries"] = summaries;
  ojson curves = ojson::array();
  for (const auto& c : report.curves) {
    ojson pts = ojson::array();
    for (const auto& p : c.points) {
      pts.push_back({{"speed_mps", p.speed},
                     {"violation_ratio", p.violation_ratio},
                     {"ci_low", p.ci_low},
                     {"ci_high", p.ci_high},
                     {"seeds", p.seeds},
                     {"per_seed", p.per_seed}});
    }
    curves.push_back({{"policy", c.policy}, {"points", pts}});
  }
  root["curves"] = curves;
  return root.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  MetricsReport r;
  ojson root;
  try {
    root = ojson::parse(text);
    r.subcommand = root.at("subcommand").get<std::string>();
    r.config_echo = root.at("config").is_null() ? std::string() : root.at("config").dump(2);
    r.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& j : root.at("summaries")) {
      PolicySummary s;
      s.label = j.at("label").get<std::string>();
      if (!j.at("n_fog").is_null()) s.n_fog = j.at("n_fog").get<std::uint32_t>();
      const auto& c = j.at("counts");
      s.counts.released = c.at("released").get<std::uint64_t>();
      s.counts.completed = c.at("completed").get<std::uint64_t>();
      s.counts.violated = c.at("violated").get<std::uint64_t>();
      s.counts.orphaned = c.at("orphaned").get<std::uint64_t>();
      s.counts.in_flight = c.at("in_flight").get<std::uint64_t>();
      s.mean_delay = j.at("mean_delay_s").get<double>();
      s.completion_ratio = j.at("completion_ratio").get<double>();
      s.violation_ratio = j.at("violation_ratio").get<double>();
      s.completion_ci_low = j.at("completion_ci").at(0).get<double>();
      s.completion_ci_high = j.at("completion_ci").at(1).get<double>();
      s.per_seed_mean_delay = j.at("per_seed_mean_delay_s").get<std::vector<double>>();
      s.per_seed_tail_delay = j.at("per_seed_tail_delay_s").get<std::vector<double>>();
      s.per_seed_completion = j.at("per_seed_completion").get<std::vector<double>>();
      for (const auto& rc : j.at("regret")) {
        s.regret.push_back({rc.at("tasks").get<std::uint64_t>(), rc.at("mean_regret_s").get<double>(),
                            rc.at("per_seed").get<std::vector<double>>()});
      }
      s.decisions = j.at("decisions").get<std::uint64_t>();
      s.index_evaluations = j.at("index_evaluations").get<std::uint64_t>();
      s.series_time = series_from(j.at("series_time"));
      s.series_task = series_from(j.at("series_task"));
      r.summaries.push_back(std::move(s));
    }
    for (const auto& cj : root.at("curves")) {
      SpeedCurve c;
      c.policy = cj.at("policy").get<std::string>();
      for (const auto& pj : cj.at("points")) {
        CurvePoint p;
        p.speed = pj.at("speed_mps").get<double>();
        p.violation_ratio = pj.at("violation_ratio").get<double>();
        p.ci_low = pj.at("ci_low").get<double>();
        p.ci_high = pj.at("ci_high").get<double>();
        p.seeds = pj.at("seeds").get<std::uint32_t>();
        p.per_seed = pj.at("per_seed").get<std::vector<double>>();
        c.points.push_back(std::move(p));
      }
      r.curves.push_back(std::move(c));
    }
  } catch (const ojson::exception& e) {
    throw ParseError(0, std::string("malformed report: ") + e.what());
  }
  return r;
}

namespace {

std::string series_csv(const MetricsReport& report, bool by_time) {
  std::ostringstream out;
  out << (by_time ? "time_s" : "task_index") << ",policy,mean_delay_s,count\n";
  for (const auto& s : report.summaries) {
    for (const auto& p : by_time ? s.series_time : s.series_task) {
      out << fmt(p.window_end) << ',' << s.label << ',' << (p.mean ? fmt(*p.mean) : "") << ','
          << p.count << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string series_time_csv(const MetricsReport& report) { return series_csv(report, true); }
std::string series_task_csv(const MetricsReport& report) { return series_csv(report, false); }

std::string completion_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "n_fog,scheme,completion_ratio,ci_low,ci_high\n";
  for (const auto& s : report.summaries) {
    out << (s.n_fog ? std::to_string(*s.n_fog) : "") << ',' << s.label << ','
        << fmt(stats::mean(s.per_seed_completion)) << ',' << fmt(s.completion_ci_low) << ','
        << fmt(s.completion_ci_high) << '\n';
  }
  return out.str();
}

std::string speed_curve_csv(const SpeedCurve& curve) {
  std::ostringstream out;
  out << "speed_mps,violation_ratio,ci_low,ci_high,seeds\n";
  for (const auto& p : curve.points) {
    out << fmt(p.speed) << ',' << fmt(p.violation_ratio) << ',' << fmt(p.ci_low) << ','
        << fmt(p.ci_high) << ',' << p.seeds << '\n';
  }
  return out.str();
}

}  // namespace vfog
