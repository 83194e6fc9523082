#include "experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "json.hpp"

#ifndef DYSON_VERSION
#define DYSON_VERSION "unknown"
#endif

namespace dyson::cli {

namespace {

const std::map<std::string, Suite>& suite_names() {
  static const std::map<std::string, Suite> names = {
      {"theorem1", Suite::kTheorem1},
      {"prop5", Suite::kProp5},
      {"prop2", Suite::kProp2},
      {"prop3-density", Suite::kProp3Density},
      {"prop4-intertwining", Suite::kProp4Intertwining},
      {"volume", Suite::kVolume},
      {"oracle-check", Suite::kOracleCheck},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw UsageError("invalid value for " + key + ": '" + value + "'");
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string command_name(Command c) { return c == Command::kVerify ? "verify" : "simulate"; }

}  // namespace

std::optional<Suite> parse_suite(const std::string& name) {
  const auto& names = suite_names();
  if (auto it = names.find(name); it != names.end()) return it->second;
  return std::nullopt;
}

std::string to_string(Suite suite) {
  for (const auto& [name, s] : suite_names())
    if (s == suite) return name;
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "command") {
    if (value == "verify") c.command = Command::kVerify;
    else if (value == "simulate") c.command = Command::kSimulate;
    else throw UsageError("unknown command '" + value + "'");
  } else if (key == "suite") {
    const auto s = parse_suite(value);
    if (!s) throw UsageError("unknown suite '" + value + "'");
    c.suite = *s;
  } else if (key == "process") {
    c.process = value;
  } else if (key == "n") {
    c.n = parse_number<int>(key, value);
  } else if (key == "m") {
    c.m = parse_number<int>(key, value);
  } else if (key == "t") {
    c.t = parse_number<double>(key, value);
  } else if (key == "steps") {
    c.steps = parse_number<int>(key, value);
  } else if (key == "samples") {
    c.samples = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "workers") {
    c.workers = parse_number<int>(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "tol_scale" || key == "tol-scale") {
    c.tol_scale = parse_number<double>(key, value);
  } else {
    throw UsageError("unknown configuration key '" + key + "'");
  }
}

void apply_config_stream(ExperimentConfig& config, std::istream& in) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "run_id" || key == "code_version") continue;
    apply_setting(config, key, value);
  }
}

std::string canonical(const ExperimentConfig& c) {
  std::ostringstream s;
  s << "command=" << command_name(c.command) << "\n";
  s << "m=" << c.m << "\n";
  s << "n=" << c.n << "\n";
  s << "process=" << c.process << "\n";
  s << "samples=" << c.samples << "\n";
  s << "seed=" << c.seed << "\n";
  s << "steps=" << c.steps << "\n";
  s << "suite=" << to_string(c.suite) << "\n";
  s << "t=" << format_double(c.t) << "\n";
  s << "tol_scale=" << format_double(c.tol_scale) << "\n";
  return s.str();
}

std::string run_id(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Verdict SuiteReport::verdict() const {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (!c.gating) continue;
    if (c.verdict == Verdict::kFail) return Verdict::kFail;
    inconclusive |= c.verdict == Verdict::kInconclusive;
  }
  return inconclusive ? Verdict::kInconclusive : Verdict::kPass;
}

int run(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const SuiteReport report = run_suite(config);
  const std::string id = run_id(config);

  namespace fs = std::filesystem;
  const fs::path dir(config.out);
  fs::create_directories(dir);

  {
    std::ofstream manifest(dir / "manifest.txt");
    manifest << "# dysonctl run manifest; pass back with --config to reproduce\n";
    manifest << "code_version=" << DYSON_VERSION << "\n";
    manifest << "run_id=" << id << "\n";
    manifest << canonical(config);
    manifest << "workers=" << config.workers << "\n";
  }
  {
    std::ofstream csv(dir / "samples.csv");
    csv << "run_id,trajectory_index";
    for (const auto& col : report.samples.columns) csv << "," << col;
    csv << "\n";
    for (std::size_t i = 0; i < report.samples.rows.size(); ++i) {
      csv << id << "," << i;
      for (double v : report.samples.rows[i]) csv << "," << format_double(v);
      csv << "\n";
    }
  }
  {
    nlohmann::ordered_json j;
    j["run_id"] = id;
    j["code_version"] = DYSON_VERSION;
    j["command"] = command_name(config.command);
    j["suite"] = config.command == Command::kVerify ? to_string(config.suite) : "simulate";
    nlohmann::ordered_json params;
    params["process"] = config.process;
    params["n"] = config.n;
    params["m"] = config.m;
    params["t"] = config.t;
    params["steps"] = config.steps;
    params["samples"] = config.samples;
    params["seed"] = config.seed;
    params["tol_scale"] = config.tol_scale;
    j["params"] = params;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
      nlohmann::ordered_json e;
      e["name"] = c.name;
      e["statistic"] = c.statistic;
      e["threshold"] = c.threshold;
      e["comparison"] = c.comparison;
      e["verdict"] = to_string(c.verdict);
      e["gating"] = c.gating;
      e["provenance"] = c.provenance;
      checks.push_back(e);
    }
    j["checks"] = checks;
    nlohmann::ordered_json notes = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.notes) notes[k] = v;
    j["notes"] = notes;
    j["verdict"] = to_string(report.verdict());
    std::ofstream summary(dir / "summary.json");
    summary << j.dump(2) << "\n";
  }

  for (const auto& c : report.checks) {
    log << (c.gating ? "" : "(advisory) ") << c.name << ": " << format_double(c.statistic) << " "
        << c.comparison << " " << format_double(c.threshold) << " -> " << to_string(c.verdict) << "\n";
  }
  for (const auto& [k, v] : report.notes) log << k << ": " << v << "\n";
  log << "verdict: " << to_string(report.verdict()) << " (run " << id << ", output in " << dir.string()
      << ")\n";

  switch (report.verdict()) {
    case Verdict::kPass: return kExitPass;
    case Verdict::kFail: return kExitFail;
    case Verdict::kInconclusive: return kExitInconclusive;
  }
  return kExitFail;
}

}  // namespace dyson::cli
