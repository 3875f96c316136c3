#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path scratch = fs::temp_directory_path() / ("wfr_cli_test_" + std::to_string(::getpid()));

struct Outcome {
  int code;
  std::string err;
};

Outcome cli(const std::string& args, const std::string& env = "") {
  fs::create_directories(scratch);
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = env + " " + WFR_CLI_PATH + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const json& doc) {
  fs::create_directories(scratch);
  const fs::path p = scratch / name;
  std::ofstream(p) << doc.dump();
  return p;
}

json sample_config() {
  return json::parse(R"({
    "experiment": "sample",
    "model1": [{"mean": 0.0, "var": 1.0}],
    "model2": [{"mean": 2.0, "var": 1.0}],
    "interpolation": {"kind": "fisher_rao", "beta": 0.5},
    "schedule": {"n_steps": 100},
    "particles": 2000,
    "snapshots": [0.5, 0.0]
  })");
}

json summary_without_clock(const fs::path& dir) {
  json j = json::parse(slurp(dir / "summary.json"));
  j.erase("wall_time_s");
  return j;
}

struct Cleanup {
  ~Cleanup() { fs::remove_all(scratch); }
} cleanup;

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("sample").code == 2);
  CHECK(cli("geodesic --no-such-flag").code == 2);
  CHECK(cli("diagnose --states 0").code == 2);
}

TEST_CASE("config errors exit 1 with a machine-readable message") {
  json bad = sample_config();
  bad["model1"][0]["var"] = -2.0;
  const Outcome o = cli("sample --config " + write_config("bad.json", bad).string() + " --output-dir " +
                        (scratch / "bad_out").string());
  CHECK(o.code == 1);
  const json err = json::parse(o.err);
  CHECK(err.at("error") == "config_error");
  CHECK(err.at("field") == "model1[0].var");

  CHECK(cli("sample --config " + (scratch / "missing.json").string()).code == 1);
  std::ofstream(scratch / "garbage.json") << "{not json";
  CHECK(cli("sample --config " + (scratch / "garbage.json").string()).code == 1);

  json geo = sample_config();
  geo["experiment"] = "geodesic";
  CHECK(cli("sample --config " + write_config("mismatch.json", geo).string()).code == 1);
}

TEST_CASE("sample runs are reproducible and thread-count independent") {
  const std::string cfg = write_config("sample.json", sample_config()).string();
  const fs::path a = scratch / "a", b = scratch / "b", c = scratch / "c";
  REQUIRE(cli("sample --config " + cfg + " --seed 7 --threads 1 --output-dir " + a.string()).code == 0);
  REQUIRE(cli("sample --config " + cfg + " --seed 7 --threads 1 --output-dir " + b.string()).code == 0);
  REQUIRE(cli("sample --config " + cfg + " --seed 7 --output-dir " + c.string(), "WFR_THREADS=3").code == 0);
  for (const char* name : {"snapshots.csv", "ess_trace.csv"}) {
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK(slurp(a / name) == slurp(c / name));
  }
  CHECK(summary_without_clock(a) == summary_without_clock(b));
  CHECK(summary_without_clock(a) == summary_without_clock(c));

  const json s = json::parse(slurp(a / "summary.json"));
  CHECK(s.at("seed") == 7);
  CHECK(s.at("config") == sample_config());
  CHECK(s.at("version").is_string());
  CHECK(s.at("wall_time_s").is_number());
  for (const char* key : {"mean", "variance", "ess_trace", "log_normalizer"}) CHECK(s.at("results").contains(key));
  CHECK(slurp(a / "snapshots.csv").rfind("snapshot_t,particle_id,x0,log_w,ell\n", 0) == 0);

  const fs::path d = scratch / "d";
  REQUIRE(cli("sample --config " + cfg + " --seed 8 --particles 500 --output-dir " + d.string()).code == 0);
  CHECK(slurp(a / "snapshots.csv") != slurp(d / "snapshots.csv"));
  CHECK(json::parse(slurp(d / "summary.json")).at("effective").at("particles") == 500);
}

TEST_CASE("diagnose adjoint reports a tiny residual") {
  const fs::path out = scratch / "adj";
  REQUIRE(cli("diagnose --check adjoint --states 10 --trials 50 --output-dir " + out.string()).code == 0);
  const json r = json::parse(slurp(out / "diagnose_adjoint.json"));
  CHECK(r.at("max_residual").get<double>() < 1e-10);
  CHECK(r.at("states") == 10);
  CHECK(r.at("trials") == 50);
}

TEST_CASE("geodesic at t = 0 starts at the first endpoint") {
  const fs::path out = scratch / "geo";
  REQUIRE(cli("geodesic --kind fisher_rao --t 0 --t 1 --output-dir " + out.string()).code == 0);
  std::istringstream rows(slurp(out / "geodesic_fisher_rao.csv"));
  std::string header, first, second;
  std::getline(rows, header);
  std::getline(rows, first);
  std::getline(rows, second);
  CHECK(header == "s,t,mu,sigma");
  CHECK(first == "0,0,0,1");
  CHECK(second.rfind("1,1,", 0) == 0);
  CHECK(cli("geodesic --kind hyperbolic --output-dir " + out.string()).code == 1);
}
