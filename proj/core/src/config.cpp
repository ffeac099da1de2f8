#include "vfog/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vfog/error.hpp"

namespace vfog {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Reads the members of one JSON object and rejects any it did not consume.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + " must be an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) throw ConfigError(key_path(key) + " must be a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key, std::optional<double> fallback) {
    const json* v = raw(key);
    if (v == nullptr) return fallback;
    if (v->is_null()) return std::nullopt;
    if (!v->is_number()) throw ConfigError(key_path(key) + " must be a number or null");
    return v->get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      throw ConfigError(key_path(key) + " must be a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ConfigError(key_path(key) + " must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(key_path(key) + " must be a string");
    return v->get<std::string>();
  }

  template <typename T, typename Convert>
  std::vector<T> list(const std::string& key, std::vector<T> fallback, Convert convert) {
    const json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) throw ConfigError(key_path(key) + " must be an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      out.push_back(convert((*v)[i], key_path(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + key_path(it.key()) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "configuration" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

double to_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + " must be a number");
  return v.get<double>();
}

std::uint64_t to_count(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError(path + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string to_str(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + " must be a string");
  return v.get<std::string>();
}

const char* population_name(HighwayScenario::Population p) {
  switch (p) {
    case HighwayScenario::Population::Poisson: return "poisson";
    case HighwayScenario::Population::Fixed: return "fixed";
    case HighwayScenario::Population::Static: return "static";
  }
  return "poisson";
}

Scenario read_scenario(const json& node, const std::string& subcommand) {
  ObjectReader r(node, "scenario");
  const std::string type = r.string("type", "");
  if (type == "synthetic-highway") {
    HighwayScenario s;
    const std::string pop = r.string("population", subcommand == "coded" ? "fixed" : "poisson");
    if (pop == "poisson") {
      s.population = HighwayScenario::Population::Poisson;
    } else if (pop == "fixed") {
      s.population = HighwayScenario::Population::Fixed;
    } else if (pop == "static") {
      s.population = HighwayScenario::Population::Static;
    } else {
      throw ConfigError("scenario.population must be poisson, fixed or static");
    }
    s.arrival_rate_hz = r.number("arrival_rate_hz", s.arrival_rate_hz);
    s.n_fog = static_cast<std::uint32_t>(r.count("n_fog", s.n_fog));
    s.dwell_min_s = r.number("dwell_min_s", s.dwell_min_s);
    s.dwell_max_s = r.number("dwell_max_s", s.dwell_max_s);
    s.cpu_min_hz = r.number("cpu_min_hz", s.cpu_min_hz);
    s.cpu_max_hz = r.number("cpu_max_hz", s.cpu_max_hz);
    s.static_cpu_hz = r.list<double>("static_cpu_hz", {}, to_number);
    r.finish();
    return s;
  }
  if (type == "trace") {
    TraceScenario s;
    s.path = r.string("path", "");
    s.client_id = r.count("client_id", 0);
    s.range_m = r.number("range_m", s.range_m);
    r.finish();
    return s;
  }
  if (type == "beta-rsu") {
    BetaScenario s;
    s.road.v_max = r.number("v_max", s.road.v_max);
    s.road.rho_jam = r.number("rho_jam", s.road.rho_jam);
    s.road.fog_fraction = r.number("fog_fraction", s.road.fog_fraction);
    s.road.rsu_coverage = r.number("rsu_coverage", s.road.rsu_coverage);
    s.mu0 = r.number("mu0", s.mu0);
    const std::string coupling = r.string("coupling", "linear");
    if (coupling == "linear") {
      s.coupling = SpeedCoupling::Linear;
    } else if (coupling == "none") {
      s.coupling = SpeedCoupling::None;
    } else {
      throw ConfigError("scenario.coupling must be linear or none");
    }
    s.task_rate_hz = r.number("task_rate_hz", s.task_rate_hz);
    s.deadline_s = r.number("deadline_s", s.deadline_s);
    s.grid_points = static_cast<std::uint32_t>(r.count("grid_points", s.grid_points));
    s.speeds = r.list<double>("speeds", {}, to_number);
    s.policies = r.list<std::string>("policies", s.policies, to_str);
    if (const json* cap = r.raw("replication_cap"); cap != nullptr && !cap->is_null()) {
      s.replication_cap = static_cast<std::uint32_t>(to_count(*cap, "scenario.replication_cap"));
    }
    r.finish();
    return s;
  }
  if (type.empty()) throw ConfigError("scenario.type is required");
  throw ConfigError("scenario.type '" + type + "' is not one of synthetic-highway, trace, beta-rsu");
}

std::vector<Variant> default_variants(const std::string& subcommand) {
  std::vector<std::string> names;
  if (subcommand == "coded") {
    names = {"alto/single", "alto/rep2", "alto/rep3", "alto/mds(3,2)", "optimal/single"};
  } else {
    names = {"alto/single", "ucb1/single", "random/single", "optimal/single"};
  }
  std::vector<Variant> out;
  for (const auto& n : names) out.push_back(Variant::parse(n));
  return out;
}

}  // namespace

SimConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  ObjectReader r(root, "");
  SimConfig c;
  c.subcommand = r.string("subcommand", "");
  if (c.subcommand != "learn" && c.subcommand != "coded" && c.subcommand != "beta-sweep") {
    throw ConfigError("subcommand must be one of learn, coded, beta-sweep");
  }
  const bool beta = c.subcommand == "beta-sweep";
  c.seed = r.count("seed", c.seed);
  c.seeds = static_cast<std::uint32_t>(r.count("seeds", c.seeds));
  c.horizon = r.number("horizon_s", beta ? 2000.0 : c.horizon);

  if (const json* link = r.raw("link")) {
    ObjectReader lr(*link, "link");
    c.link.data_rate_bps = lr.number("data_rate_bps", c.link.data_rate_bps);
    c.link.retry_slot = lr.optional_number("retry_slot_s", c.link.retry_slot);
    c.link_success_prob = lr.number("link_success_prob", c.link_success_prob);
    lr.finish();
  }

  const json* scenario = r.raw("scenario");
  if (scenario == nullptr) throw ConfigError("scenario is required");
  c.scenario = read_scenario(*scenario, c.subcommand);
  if (beta != std::holds_alternative<BetaScenario>(c.scenario)) {
    throw ConfigError(beta ? "scenario.type must be beta-rsu for beta-sweep"
                           : "scenario.type beta-rsu is only valid for beta-sweep");
  }

  c.workload.max_tasks = beta ? 0 : 5000;
  if (c.subcommand == "coded") c.workload.deadline_s = 0.55;
  if (const json* w = r.raw("workload")) {
    ObjectReader wr(*w, "workload");
    c.workload.mean_interarrival_s = wr.number("mean_interarrival_s", c.workload.mean_interarrival_s);
    c.workload.bits_min = wr.number("bits_min", c.workload.bits_min);
    c.workload.bits_max = wr.number("bits_max", c.workload.bits_max);
    c.workload.intensity = wr.number("intensity", c.workload.intensity);
    c.workload.output_bits = wr.number("output_bits", c.workload.output_bits);
    c.workload.deadline_s = wr.optional_number("deadline_s", c.workload.deadline_s);
    c.workload.max_tasks = wr.count("max_tasks", c.workload.max_tasks);
    wr.finish();
  }

  if (const json* a = r.raw("alto")) {
    ObjectReader ar(*a, "alto");
    c.alto.beta0 = ar.number("beta0", c.alto.beta0);
    c.alto.w_min = ar.number("w_min", c.alto.w_min);
    c.alto.x_min = ar.number("x_min", c.alto.x_min);
    c.alto.x_max = ar.number("x_max", c.alto.x_max);
    c.alto.d_ref = ar.number("d_ref", c.alto.d_ref);
    ar.finish();
  }

  c.variants = r.list<Variant>("variants", default_variants(c.subcommand),
                               [](const json& v, const std::string& path) {
                                 try {
                                   return Variant::parse(to_str(v, path));
                                 } catch (const InvalidParameter& e) {
                                   throw ConfigError(path + ": " + e.what());
                                 }
                               });
  const std::vector<std::uint64_t> default_sweep =
      c.subcommand == "coded" ? std::vector<std::uint64_t>{3, 4, 5, 6, 8, 10} : std::vector<std::uint64_t>{};
  for (auto n : r.list<std::uint64_t>("n_fog_sweep", default_sweep, to_count)) {
    c.n_fog_sweep.push_back(static_cast<std::uint32_t>(n));
  }

  if (const json* k = r.raw("coding")) {
    ObjectReader kr(*k, "coding");
    c.fallback = kr.boolean("fallback", c.fallback);
    c.reoffload_on_departure = kr.boolean("reoffload_on_departure", c.reoffload_on_departure);
    c.cancel_stale = kr.boolean("cancel_stale", c.cancel_stale);
    c.coding_overhead_s = kr.number("overhead_s", c.coding_overhead_s);
    kr.finish();
  }

  if (const json* m = r.raw("metrics")) {
    ObjectReader mr(*m, "metrics");
    c.metrics.window_s = mr.number("window_s", c.metrics.window_s);
    c.metrics.task_window = mr.count("task_window", c.metrics.task_window);
    c.metrics.regret_checkpoints = mr.list<std::uint64_t>("regret_checkpoints",
                                                          c.metrics.regret_checkpoints, to_count);
    mr.finish();
  }
  r.finish();
  c.validate();
  if (c.subcommand == "coded") {
    const auto* hw = std::get_if<HighwayScenario>(&c.scenario);
    if (hw != nullptr && hw->population == HighwayScenario::Population::Poisson) {
      throw ConfigError("scenario.population must be fixed or static for the coded sweep");
    }
    if (c.n_fog_sweep.empty()) throw ConfigError("n_fog_sweep must not be empty for the coded sweep");
  }
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const SimConfig& c) {
  ordered_json root;
  root["subcommand"] = c.subcommand;
  root["seed"] = c.seed;
  root["seeds"] = c.seeds;
  root["horizon_s"] = c.horizon;
  root["link"] = {{"data_rate_bps", c.link.data_rate_bps},
                  {"retry_slot_s", c.link.retry_slot ? ordered_json(*c.link.retry_slot) : ordered_json(nullptr)},
                  {"link_success_prob", c.link_success_prob}};
  std::visit([&](const auto& s) {
    using T = std::decay_t<decltype(s)>;
    ordered_json j;
    if constexpr (std::is_same_v<T, HighwayScenario>) {
      j["type"] = "synthetic-highway";
      j["population"] = population_name(s.population);
      j["arrival_rate_hz"] = s.arrival_rate_hz;
      j["n_fog"] = s.n_fog;
      j["dwell_min_s"] = s.dwell_min_s;
      j["dwell_max_s"] = s.dwell_max_s;
      j["cpu_min_hz"] = s.cpu_min_hz;
      j["cpu_max_hz"] = s.cpu_max_hz;
      j["static_cpu_hz"] = s.static_cpu_hz;
    } else if constexpr (std::is_same_v<T, TraceScenario>) {
      j["type"] = "trace";
      j["path"] = s.path;
      j["client_id"] = s.client_id;
      j["range_m"] = s.range_m;
    } else {
      j["type"] = "beta-rsu";
      j["v_max"] = s.road.v_max;
      j["rho_jam"] = s.road.rho_jam;
      j["fog_fraction"] = s.road.fog_fraction;
      j["rsu_coverage"] = s.road.rsu_coverage;
      j["mu0"] = s.mu0;
      j["coupling"] = s.coupling == SpeedCoupling::Linear ? "linear" : "none";
      j["task_rate_hz"] = s.task_rate_hz;
      j["deadline_s"] = s.deadline_s;
      j["grid_points"] = s.grid_points;
      j["speeds"] = s.speeds;
      j["policies"] = s.policies;
      j["replication_cap"] = s.replication_cap ? ordered_json(*s.replication_cap) : ordered_json(nullptr);
    }
    root["scenario"] = j;
  }, c.scenario);
  root["workload"] = {{"mean_interarrival_s", c.workload.mean_interarrival_s},
                      {"bits_min", c.workload.bits_min},
                      {"bits_max", c.workload.bits_max},
                      {"intensity", c.workload.intensity},
                      {"output_bits", c.workload.output_bits},
                      {"deadline_s", c.workload.deadline_s ? ordered_json(*c.workload.deadline_s) : ordered_json(nullptr)},
                      {"max_tasks", c.workload.max_tasks}};
  root["alto"] = {{"beta0", c.alto.beta0},
                  {"w_min", c.alto.w_min},
                  {"x_min", c.alto.x_min},
                  {"x_max", c.alto.x_max},
                  {"d_ref", c.alto.d_ref}};
  ordered_json variants = ordered_json::array();
  for (const auto& v : c.variants) variants.push_back(v.label());
  root["variants"] = variants;
  root["n_fog_sweep"] = c.n_fog_sweep;
  root["coding"] = {{"fallback", c.fallback},
                    {"reoffload_on_departure", c.reoffload_on_departure},
                    {"cancel_stale", c.cancel_stale},
                    {"overhead_s", c.coding_overhead_s}};
  root["metrics"] = {{"window_s", c.metrics.window_s},
                     {"task_window", c.metrics.task_window},
                     {"regret_checkpoints", c.metrics.regret_checkpoints}};
  return root.dump(2);
}

}  // namespace vfog
