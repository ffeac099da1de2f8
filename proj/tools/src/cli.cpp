#include "vfog/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>

#include "vfog/config.hpp"
#include "vfog/error.hpp"
#include "vfog/experiments.hpp"
#include "vfog/mobility.hpp"
#include "vfog/selftest.hpp"

namespace vfog::cli {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

namespace {

struct Options {
  std::string subcommand;
  std::string config_path;
  std::string trace_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::string out_dir;
  unsigned threads = 0;
  bool verbose = false;
};

// Files are written with a ".partial" suffix and renamed once every output
// of the run exists. A failure midway leaves the partial files behind.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const std::string& bytes) {
    fs::create_directories(dir_);
    std::ofstream f(dir_ / (name + ".partial"), std::ios::binary);
    f << bytes;
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    files_.emplace_back(name, sha256_hex(bytes), bytes.size());
  }

  void commit(const std::string& config_hash) {
    ojson manifest;
    manifest["config_sha256"] = config_hash;
    manifest["files"] = ojson::array();
    for (const auto& [name, hash, size] : files_) {
      manifest["files"].push_back({{"name", name}, {"sha256", hash}, {"bytes", size}});
    }
    add("manifest.json", manifest.dump(2) + "\n");
    for (const auto& f : files_) {
      const auto& name = std::get<0>(f);
      fs::rename(dir_ / (name + ".partial"), dir_ / name);
    }
  }

 private:
  fs::path dir_;
  std::vector<std::tuple<std::string, std::string, std::size_t>> files_;
};

SimConfig resolve_config(const Options& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("cannot read config file '" + opt.config_path + "'");
  ojson doc;
  try {
    doc = ojson::parse(in);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (!doc.contains("subcommand")) doc["subcommand"] = opt.subcommand;
  if (doc["subcommand"] != opt.subcommand) {
    throw ConfigError("config subcommand '" + doc["subcommand"].dump() + "' does not match '" +
                      opt.subcommand + "'");
  }
  if (opt.seed) doc["seed"] = *opt.seed;
  if (opt.horizon) doc["horizon_s"] = *opt.horizon;
  return parse_config(doc.dump());
}

void write_report(OutputSet& outputs, const SimConfig& config, const MetricsReport& report) {
  outputs.add("report.json", to_json(report));
  if (config.subcommand == "learn") {
    outputs.add("series_time.csv", series_time_csv(report));
    outputs.add("series_task.csv", series_task_csv(report));
  } else if (config.subcommand == "coded") {
    outputs.add("completion.csv", completion_csv(report));
  } else {
    for (const auto& curve : report.curves) {
      outputs.add("speed_curve_" + curve.policy + ".csv", speed_curve_csv(curve));
    }
  }
}

void print_summary(const MetricsReport& report, std::ostream& out) {
  for (const auto& s : report.summaries) {
    out << s.label;
    if (s.n_fog) out << " n_fog=" << *s.n_fog;
    out << " mean_delay=" << s.mean_delay << " completion=" << s.completion_ratio << '\n';
  }
  for (const auto& c : report.curves) {
    const auto check = check_unimodal([&] {
      std::vector<double> v;
      for (const auto& p : c.points) v.push_back(p.violation_ratio);
      return v;
    }());
    out << c.policy << " argmin_speed=" << c.points.at(check.argmin).speed
        << " violation=" << c.points.at(check.argmin).violation_ratio << '\n';
  }
}

int run_experiment(const Options& opt, std::ostream& out, std::ostream& err) {
  SimConfig config;
  try {
    config = resolve_config(opt);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const std::string echo = config_to_json(config);
  OutputSet outputs(opt.out_dir);
  try {
    ExperimentOptions eo;
    eo.threads = opt.threads;
    if (opt.verbose) out << "running " << config.subcommand << " with " << config.seeds << " seeds\n";
    MetricsReport report;
    if (config.subcommand == "learn") {
      report = run_case_a(config, eo);
    } else if (config.subcommand == "coded") {
      report = run_coded_sweep(config, eo);
    } else {
      report = run_case_b(config, eo);
    }
    outputs.add("config.json", echo);
    write_report(outputs, config, report);
    outputs.commit(sha256_hex(echo));
    if (opt.verbose) print_summary(report, out);
    out << "wrote " << opt.out_dir << '\n';
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int run_trace_check(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    const TraceTimeline t = load_trace_file(opt.trace_path);
    std::set<std::uint64_t> fog;
    for (const auto& r : t.records()) {
      if (r.is_fog) fog.insert(r.vehicle_id);
    }
    const auto times = t.distinct_times();
    out << "ok: " << t.records().size() << " records, " << t.vehicles().size() << " vehicles ("
        << fog.size() << " fog)";
    if (!times.empty()) out << ", t in [" << times.front() << ", " << times.back() << "]";
    out << '\n';
    return kOk;
  } catch (const Error& e) {
    err << opt.trace_path << ": " << e.what() << '\n';
  }
  return kConfigError;
}

int run_self_test(std::ostream& out) {
  bool ok = true;
  const auto coding = coding_oracle_check(10000, 1);
  out << (coding.passed() ? "PASS" : "FAIL") << " coding oracle: " << coding.instances
      << " instances, " << coding.mismatches << " mismatches\n";
  ok = ok && coding.passed();
  for (const auto& row : dp_oracle_check(shipped_dp_instances())) {
    const bool pass = row.value_ok && row.agreement_ok;
    out << (pass ? "PASS" : "FAIL") << " dp " << row.name << ": optimal=" << row.optimal
        << " beta=" << row.beta << " bound=" << row.bound
        << " agreement=" << row.agreement.fraction() << '\n';
    ok = ok && pass;
  }
  return ok ? kOk : kRuntimeError;
}

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "out";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  opt.out_dir = default_out_dir();
  CLI::App app{"Vehicular fog offloading simulator", "vfog"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", opt.verbose, "Print a summary of the results");

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opt.config_path, "JSON configuration file")->required();
    sub->add_option("--seed", opt.seed, "First seed");
    sub->add_option("--horizon", opt.horizon, "Simulated horizon in seconds");
    sub->add_option("-o,--out", opt.out_dir, "Output directory");
    sub->add_option("-j,--threads", opt.threads, "Worker threads (0 = all cores)");
    sub->add_flag("-v,--verbose", opt.verbose, "Print a summary of the results");
  };
  for (const char* name : {"learn", "coded", "beta-sweep"}) {
    add_run_options(app.add_subcommand(name, std::string("Run the ") + name + " experiment"));
  }
  auto* trace = app.add_subcommand("trace-check", "Validate a mobility trace CSV");
  trace->add_option("trace", opt.trace_path, "Trace file")->required();
  app.add_subcommand("self-test", "Run the built-in oracle checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }
  opt.subcommand = app.get_subcommands().front()->get_name();

  if (opt.subcommand == "trace-check") return run_trace_check(opt, out, err);
  if (opt.subcommand == "self-test") return run_self_test(out);
  return run_experiment(opt, out, err);
}

}  // namespace vfog::cli
