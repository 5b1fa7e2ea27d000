#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "whitham/cli.hpp"
#include "whitham/errors.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = whitham::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits cleanly") {
  const auto r = call({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate") != std::string::npos);
}

TEST_CASE("unknown command and flags are usage errors") {
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  const auto r = call({"simulate", "--bogus", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
}

TEST_CASE("bad values are configuration errors and write nothing") {
  TempDir dir("whitham_cli_bad");
  const auto report = dir.path / "r.json";
  CHECK(call({"verify", "--suite", "error-decay", "--s", "abc", "--out", report.string()}).code == 2);
  CHECK(call({"verify", "--suite", "nope", "--out", report.string()}).code == 2);
  CHECK(call({"periodic-nonuniform", "--n", "32,64", "--out", report.string()}).code == 2);
  CHECK(call({"simulate", "--symbol", "airy", "--init", "sine:1,1", "--out", (dir.path / "run").string()}).code == 2);
  CHECK(call({"simulate", "--init", "sine:1,1", "--dt", "0.1", "--cfl", "0.5"}).code == 2);
  CHECK_FALSE(fs::exists(report));
  CHECK_FALSE(fs::exists(dir.path / "run"));
}

TEST_CASE("symbols eval prints two columns") {
  const auto r = call({"symbols", "eval", "--symbol", "kdv", "--xi", "0,1.5,3"});
  CHECK(r.code == 0);
  CHECK(r.out == "0 0\n1.5 2.25\n3 9\n");
}

TEST_CASE("simulate writes trajectory and diagnostics") {
  TempDir dir("whitham_cli_sim");
  const auto out = (dir.path / "run").string() + "/";
  const auto r = call({"simulate", "--symbol", "whitham", "--init", "sine:1,1.0", "--L",
                       "6.283185307", "--modes", "64", "--t-end", "0.2", "--s", "2.0", "--out", out});
  CHECK(r.code == 0);
  const auto diag = slurp(dir.path / "run" / "diagnostics.csv");
  CHECK(diag.rfind("t,mean,l2,hamiltonian,hs_norm\n", 0) == 0);
  const auto traj = slurp(dir.path / "run" / "trajectory.csv");
  CHECK(traj.rfind("t,x,u\n", 0) == 0);
  CHECK(fs::exists(dir.path / "run" / "final.txt"));
}

TEST_CASE("simulate from family and file spellings") {
  TempDir dir("whitham_cli_fam");
  const auto a = (dir.path / "a").string();
  CHECK(call({"simulate", "--init", "family:periodic:n=4,omega=1,s=2", "--t-end", "0.1", "--out", a}).code == 0);
  const auto b = (dir.path / "b").string();
  CHECK(call({"simulate", "--family", "periodic", "--n", "4", "--omega", "1", "--t-end", "0.1", "--out", b}).code == 0);
  CHECK(slurp(dir.path / "a" / "diagnostics.csv") == slurp(dir.path / "b" / "diagnostics.csv"));
  const auto c = (dir.path / "c").string();
  CHECK(call({"simulate", "--init", "file:" + (dir.path / "a" / "final.txt").string(), "--t-end", "0.05",
              "--out", c}).code == 0);
  CHECK(call({"simulate", "--init", "family:line:lambda=4,delta=1.5", "--t-end", "0.05", "--dt", "0.01",
              "--out", (dir.path / "d").string()}).code == 0);
  CHECK(call({"simulate", "--init", "family:periodic:n=4,q=1"}).code == 2);
}

TEST_CASE("blow-up in simulate exits 1 with outputs written") {
  TempDir dir("whitham_cli_blowup");
  const auto out = (dir.path / "run").string();
  const auto r = call({"simulate", "--symbol", "zero", "--init", "sine:1,1", "--modes", "128",
                       "--t-end", "3", "--dt", "0.001", "--blowup-threshold", "20", "--out", out});
  CHECK(r.code == 1);
  CHECK(fs::exists(dir.path / "run" / "diagnostics.csv"));
}

TEST_CASE("experiment reports and exit codes") {
  TempDir dir("whitham_cli_report");
  const auto report = (dir.path / "ed.json").string();
  const auto ok = call({"verify", "--suite", "error-decay", "--family", "periodic", "--s", "2.0",
                        "--sigma", "0", "--out", report, "--reproducible"});
  CHECK(ok.code == 0);
  const auto doc = nlohmann::json::parse(slurp(report));
  CHECK(doc["experiment_id"] == "verify-error-decay");
  CHECK(doc["verdicts"]["residual_slope"]["passed"] == true);
  CHECK_FALSE(doc.contains("sidecar"));
  CHECK(doc["params"].contains("seed"));

  // a deliberately impossible floor fails the separation verdict but still writes the report
  const auto failing = (dir.path / "pn.json").string();
  const auto bad = call({"periodic-nonuniform", "--n", "8,16,32", "--t-star", "0.2", "--floor", "100",
                         "--out", failing});
  CHECK(bad.code == 1);
  CHECK(fs::exists(failing));
}

TEST_CASE("report to stdout without --out") {
  const auto r = call({"verify", "--suite", "symbol-conditions", "--symbol", "fkdv:1.5"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["experiment_id"] == "verify-symbol-conditions");
}

TEST_CASE("config file values with command-line precedence") {
  TempDir dir("whitham_cli_config");
  const auto cfg = dir.path / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "# error decay at s = 1\n[verify]\nsuite = error-decay\ns = 1.0\nsigma = \"0\"\n"
         "reproducible = true\nfamily = periodic  # trailing comment\n";
  }
  const auto a = (dir.path / "a.json").string();
  const auto b = (dir.path / "b.json").string();
  const auto c = (dir.path / "c.json").string();
  CHECK(call({"verify", "--config", cfg.string(), "--out", a}).code == 0);
  CHECK(nlohmann::json::parse(slurp(a))["params"]["s"] == 1.0);
  CHECK(call({"verify", "--config", cfg.string(), "--s", "2", "--out", b}).code == 0);
  CHECK(call({"--config", cfg.string(), "verify", "--s", "2", "--out", c}).code == 0);
  CHECK(nlohmann::json::parse(slurp(b))["params"]["s"] == 2.0);
  CHECK(slurp(b) == slurp(c));

  const auto args = whitham::cli::config_file_args(cfg.string());
  CHECK(args == std::vector<std::string>{"--suite", "error-decay", "--s", "1.0", "--sigma", "0",
                                         "--reproducible", "--family", "periodic"});
  CHECK(call({"verify", "--config", (dir.path / "missing.cfg").string()}).code == 2);
}

TEST_CASE("identical invocations give byte-identical reproducible reports") {
  TempDir dir("whitham_cli_repro");
  const auto a = (dir.path / "a.json").string();
  const auto b = (dir.path / "b.json").string();
  CHECK(call({"verify", "--suite", "norm-lemmas", "--lambda", "16,32,64", "--reproducible", "--out", a}).code == 0);
  CHECK(call({"verify", "--suite", "norm-lemmas", "--lambda", "16,32,64", "--reproducible", "--jobs", "3",
              "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("directory --out gets a default report name") {
  TempDir dir("whitham_cli_dir");
  const auto out = dir.path.string() + "/";
  CHECK(call({"verify", "--suite", "symbol-conditions", "--out", out}).code == 0);
  CHECK(fs::exists(dir.path / "verify-symbol-conditions.json"));
}

}
