#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "experiment.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dyson::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dysonctl_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_quiet(const ExperimentConfig& c) {
  std::ostringstream log;
  return run(c, log);
}

int dysonctl(const std::string& args) {
  const std::string cmd = std::string(DYSONCTL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_theorem1(const fs::path& out) {
  ExperimentConfig c;
  c.suite = Suite::kTheorem1;
  c.n = 1;
  c.steps = 50;
  c.samples = 2000;
  c.seed = 7;
  c.out = out.string();
  return c;
}

}  // namespace

TEST_CASE("suite names round-trip") {
  for (auto s : {Suite::kTheorem1, Suite::kProp5, Suite::kProp2, Suite::kProp3Density, Suite::kProp4Intertwining,
                 Suite::kVolume, Suite::kOracleCheck})
    CHECK(parse_suite(to_string(s)) == s);
  CHECK_FALSE(parse_suite("theorem-one").has_value());
}

TEST_CASE("settings parse and reject malformed values") {
  ExperimentConfig c;
  apply_setting(c, "n", "3");
  apply_setting(c, "t", "0.5");
  apply_setting(c, "tol-scale", "2");
  apply_setting(c, "suite", "prop2");
  CHECK(c.n == 3);
  CHECK(c.t == 0.5);
  CHECK(c.tol_scale == 2.0);
  CHECK(c.suite == Suite::kProp2);
  CHECK_THROWS_AS(apply_setting(c, "n", "three"), UsageError);
  CHECK_THROWS_AS(apply_setting(c, "n", "3x"), UsageError);
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), UsageError);
  CHECK_THROWS_AS(apply_setting(c, "suite", "nope"), UsageError);
}

TEST_CASE("config streams skip comments and manifest-only keys") {
  ExperimentConfig c;
  std::istringstream in("# header\ncode_version=9.9\nrun_id=abc\n n = 4 \nseed=11\n\nsamples=1234\n");
  apply_config_stream(c, in);
  CHECK(c.n == 4);
  CHECK(c.seed == 11);
  CHECK(c.samples == 1234);
  std::istringstream bad("n 4\n");
  CHECK_THROWS_AS(apply_config_stream(c, bad), UsageError);
}

TEST_CASE("run_id depends on results-relevant settings only") {
  ExperimentConfig a, b;
  b.out = "/elsewhere";
  b.workers = 5;
  CHECK(run_id(a) == run_id(b));
  CHECK(run_id(a).size() == 16);
  b.seed = 2;
  CHECK(run_id(a) != run_id(b));
}

TEST_CASE("validation rejects out-of-range configurations") {
  ExperimentConfig c;
  CHECK_NOTHROW(validate(c));
  auto bad = [](auto mutate) {
    ExperimentConfig x;
    mutate(x);
    CHECK_THROWS_AS(validate(x), UsageError);
  };
  bad([](ExperimentConfig& x) { x.n = 0; });
  bad([](ExperimentConfig& x) { x.n = 9; });
  bad([](ExperimentConfig& x) { x.m = 2; });
  bad([](ExperimentConfig& x) { x.t = 0; });
  bad([](ExperimentConfig& x) { x.steps = 0; });
  bad([](ExperimentConfig& x) { x.tol_scale = 0; });
  bad([](ExperimentConfig& x) { x.samples = 999; });
  bad([](ExperimentConfig& x) {
    x.command = Command::kSimulate;
    x.process = "dyson-b";
  });
  ExperimentConfig ok;
  ok.n = 3;
  ok.m = 2;
  CHECK_NOTHROW(validate(ok));
}

TEST_CASE("run writes manifest, samples and summary") {
  const auto dir = scratch("files");
  const auto c = small_theorem1(dir);
  CHECK(run_quiet(c) == kExitPass);
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("run_id=" + run_id(c)) != std::string::npos);
  CHECK(manifest.find("code_version=") != std::string::npos);
  CHECK(manifest.find("seed=7") != std::string::npos);

  std::ifstream csv(dir / "samples.csv");
  std::string header, line;
  std::getline(csv, header);
  CHECK(header == "run_id,trajectory_index,value");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == c.samples);

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["run_id"] == run_id(c));
  CHECK(summary["verdict"] == "pass");
  REQUIRE(summary["checks"].size() == 1);
  const auto& check = summary["checks"][0];
  CHECK(check["statistic"].get<double>() < check["threshold"].get<double>());
  CHECK(summary["params"]["n"] == 1);
}

TEST_CASE("reruns are byte-identical, including from the manifest") {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b"), m = scratch("rerun_manifest");
  const auto c = small_theorem1(a);
  run_quiet(c);
  auto c2 = c;
  c2.out = b.string();
  run_quiet(c2);
  ExperimentConfig c3;
  std::ifstream manifest(a / "manifest.txt");
  apply_config_stream(c3, manifest);
  c3.out = m.string();
  run_quiet(c3);
  for (const char* f : {"samples.csv", "summary.json", "manifest.txt"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(m / f));
  }
}

TEST_CASE("samples do not depend on the worker count") {
  const auto a = scratch("workers_1"), b = scratch("workers_3");
  ExperimentConfig c;
  c.command = Command::kSimulate;
  c.process = "dyson-c";
  c.n = 4;
  c.steps = 200;
  c.samples = 300;
  c.workers = 1;
  c.out = a.string();
  run_quiet(c);
  c.workers = 3;
  c.out = b.string();
  run_quiet(c);
  CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("verdicts map to exit statuses") {
  ExperimentConfig pass;
  pass.suite = Suite::kOracleCheck;
  pass.n = 3;
  pass.steps = 20;
  pass.samples = 200;
  pass.out = scratch("exit_pass").string();
  CHECK(run_quiet(pass) == kExitPass);

  ExperimentConfig fail;
  fail.suite = Suite::kProp3Density;
  fail.n = 2;
  fail.tol_scale = 1e-20;
  fail.out = scratch("exit_fail").string();
  CHECK(run_quiet(fail) == kExitFail);

  ExperimentConfig vague;
  vague.suite = Suite::kProp4Intertwining;
  vague.n = 3;
  vague.samples = 50;
  vague.out = scratch("exit_inconclusive").string();
  CHECK(run_quiet(vague) == kExitInconclusive);
}

TEST_CASE("dysonctl exit statuses") {
  const auto dir = scratch("binary").string();
  CHECK(dysonctl("verify --suite nonsense --out " + dir) == kExitUsage);
  CHECK(dysonctl("verify --suite prop2 --samples 10 --out " + dir) == kExitUsage);
  CHECK(dysonctl("verify --out " + dir) == kExitUsage);
  CHECK(dysonctl("frobnicate") == kExitUsage);
  CHECK(dysonctl("oracle-check --n 2 --steps 10 --samples 50 --out " + dir) == kExitPass);
  CHECK(dysonctl("verify --suite prop3-density --n 2 --tol-scale 1e-20 --out " + dir) == kExitFail);
  CHECK(dysonctl("verify --suite theorem1 --n 1 --steps 50 --samples 2000 --seed 7 --out " + dir) == kExitPass);
  CHECK(dysonctl("--config " + dir + "/manifest.txt") == kExitUsage);
  CHECK(dysonctl("verify --suite theorem1 --config " + dir + "/manifest.txt --out " + dir + "/again") == kExitPass);
  CHECK(slurp(fs::path(dir) / "samples.csv") == slurp(fs::path(dir) / "again" / "samples.csv"));
}
