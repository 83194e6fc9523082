#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "experiment.hpp"

namespace {

using dyson::cli::ExperimentConfig;
using dyson::cli::UsageError;

struct Overrides {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> settings;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_file, "key=value file, e.g. a manifest.txt from an earlier run");
  for (const char* key : {"seed", "n", "m", "t", "steps", "samples", "workers", "out", "tol-scale"}) {
    app->add_option_function<std::string>(
        std::string("--") + key, [&o, key](const std::string& v) { o.settings.emplace_back(key, v); },
        std::string("override ") + key);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Running maximum of reflected Brownian lattices and Dyson wall systems"};
  app.require_subcommand(1);
  Overrides o;
  std::string suite = "theorem1", process;

  auto* simulate = app.add_subcommand("simulate", "sample a process and write samples.csv");
  add_common(simulate, o);
  simulate->add_option("--process", process, "sup-z, z, y, dyson-a, dyson-c or dyson-d");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, o);
  verify->add_option("--suite", suite, "theorem1, prop5, prop2, prop3-density, prop4-intertwining, volume")
      ->required();

  auto* oracle = app.add_subcommand("oracle-check", "compare the recursions against last-passage oracles");
  add_common(oracle, o);
  auto* volume = app.add_subcommand("volume", "Monte Carlo cone volume against h");
  add_common(volume, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dyson::cli::kExitUsage;
  }

  try {
    ExperimentConfig config;
    if (!o.config_file.empty()) {
      std::ifstream in(o.config_file);
      if (!in) throw UsageError("cannot read config file " + o.config_file);
      dyson::cli::apply_config_stream(config, in);
    }
    if (simulate->parsed()) {
      dyson::cli::apply_setting(config, "command", "simulate");
      if (!process.empty()) dyson::cli::apply_setting(config, "process", process);
    } else {
      dyson::cli::apply_setting(config, "command", "verify");
      if (verify->parsed()) dyson::cli::apply_setting(config, "suite", suite);
      if (oracle->parsed()) dyson::cli::apply_setting(config, "suite", "oracle-check");
      if (volume->parsed()) dyson::cli::apply_setting(config, "suite", "volume");
    }
    for (const auto& [key, value] : o.settings) dyson::cli::apply_setting(config, key, value);
    return dyson::cli::run(config, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "dysonctl: " << e.what() << "\n";
    return dyson::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dysonctl: " << e.what() << "\n";
    return dyson::cli::kExitFail;
  }
}
