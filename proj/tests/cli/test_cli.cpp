#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vfog/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = vfog::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vfog_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path small_learn_config(const fs::path& dir) {
  const fs::path p = dir / "learn.json";
  std::ofstream(p) << R"({"subcommand":"learn","seeds":2,"horizon_s":150,
    "scenario":{"type":"synthetic-highway","population":"poisson","arrival_rate_hz":0.125},
    "workload":{"max_tasks":200},"variants":["alto/single","random/single"]})";
  return p;
}

}  // namespace

TEST_CASE("learn twice with the same seed gives identical outputs") {
  const fs::path dir = scratch("determinism");
  const auto cfg = small_learn_config(dir).string();
  const auto a = run({"learn", "--config", cfg, "--seed", "7", "-o", (dir / "a").string()});
  const auto b = run({"learn", "--config", cfg, "--seed", "7", "-o", (dir / "b").string(), "-j", "1"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const std::string ma = slurp(dir / "a" / "manifest.json");
  CHECK(ma == slurp(dir / "b" / "manifest.json"));
  const auto manifest = json::parse(ma);
  CHECK(manifest["files"].size() == 4);
  for (const auto& f : manifest["files"]) {
    const std::string bytes = slurp(dir / "a" / f["name"].get<std::string>());
    CHECK(vfog::cli::sha256_hex(bytes) == f["sha256"]);
    CHECK(bytes.size() == f["bytes"]);
  }
  CHECK(vfog::cli::sha256_hex(slurp(dir / "a" / "config.json")) == manifest["config_sha256"]);
  CHECK(json::parse(slurp(dir / "a" / "config.json"))["seed"] == 7);

  const auto c = run({"learn", "--config", cfg, "--seed", "8", "-o", (dir / "c").string()});
  REQUIRE(c.code == 0);
  CHECK(slurp(dir / "c" / "report.json") != slurp(dir / "a" / "report.json"));

  // The echoed config reproduces the run.
  const auto d = run({"learn", "--config", (dir / "a" / "config.json").string(), "-o", (dir / "d").string()});
  REQUIRE(d.code == 0);
  CHECK(slurp(dir / "d" / "manifest.json") == ma);
  fs::remove_all(dir);
}

TEST_CASE("trace-check") {
  const std::string fixtures = VFOG_FIXTURE_DIR;
  const auto ok = run({"trace-check", fixtures + "/trace_small.csv"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("ok:") == 0);
  const auto bad = run({"trace-check", fixtures + "/trace_bad.csv"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(run({"trace-check", fixtures + "/missing.csv"}).code == 1);
}

TEST_CASE("self-test passes") {
  const auto r = run({"self-test"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS coding oracle") != std::string::npos);
}

TEST_CASE("configuration errors exit 1 and write nothing") {
  const fs::path dir = scratch("config_error");
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"subcommand":"learn","scenario":{"type":"synthetic-highway"},"sheme":"alto"})";
  const auto r = run({"learn", "--config", cfg.string(), "-o", (dir / "out").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("sheme") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));

  const auto mismatch = run({"coded", "--config", small_learn_config(dir).string(), "-o", (dir / "out").string()});
  CHECK(mismatch.code == 1);
  CHECK_FALSE(fs::exists(dir / "out"));

  CHECK(run({"learn"}).code == 1);
  CHECK(run({"learn", "--config", (dir / "nope.json").string()}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("runtime errors exit 2") {
  const fs::path dir = scratch("runtime_error");
  const fs::path blocker = dir / "file";
  std::ofstream(blocker) << "x";
  const auto r = run({"learn", "--config", small_learn_config(dir).string(), "-o", blocker.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("runtime error") != std::string::npos);

  const fs::path trace_cfg = dir / "trace.json";
  std::ofstream(trace_cfg) << R"({"subcommand":"learn","seeds":1,"horizon_s":10,
    "scenario":{"type":"trace","path":")" + (dir / "absent.csv").string() + R"(","client_id":1}})";
  const auto missing = run({"learn", "--config", trace_cfg.string(), "-o", (dir / "out").string()});
  CHECK(missing.code != 0);
  CHECK_FALSE(fs::exists(dir / "out" / "manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch("env");
  ::setenv(vfog::cli::kOutDirEnv, (dir / "from_env").string().c_str(), 1);
  const auto r = run({"learn", "--config", small_learn_config(dir).string()});
  ::unsetenv(vfog::cli::kOutDirEnv);
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "from_env" / "manifest.json"));
  CHECK(fs::exists(dir / "from_env" / "series_time.csv"));
  fs::remove_all(dir);
}
