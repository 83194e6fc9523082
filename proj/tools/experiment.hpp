#pragma once

// Batch verification runner behind dysonctl: configuration, the suites, and the
// manifest / samples / summary writers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dyson::cli {

enum class Suite { kTheorem1, kProp5, kProp2, kProp3Density, kProp4Intertwining, kVolume, kOracleCheck };

std::optional<Suite> parse_suite(const std::string& name);
std::string to_string(Suite suite);

enum class Command { kVerify, kSimulate };

struct ExperimentConfig {
  Command command = Command::kVerify;
  Suite suite = Suite::kTheorem1;
  std::string process = "sup-z";  // simulate only: sup-z, z, y, dyson-a, dyson-c, dyson-d
  int n = 2;
  int m = 0;  // 0: ceil(n / 2)
  double t = 1.0;
  int steps = 1000;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out = ".";
  double tol_scale = 1.0;
};

/// Invalid configuration; dysonctl exits with status 64.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Apply one key=value setting. Unknown keys and malformed values throw UsageError.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Read a flat key=value file ('#' starts a comment). Keys written by the
/// manifest but not part of the configuration (run_id, code_version) are skipped.
void apply_config_stream(ExperimentConfig& config, std::istream& in);

/// Canonical key=value text of every setting that affects results (not out, workers).
std::string canonical(const ExperimentConfig& config);

/// 16 hex digits of the FNV-1a hash of canonical(config).
std::string run_id(const ExperimentConfig& config);

/// Throws UsageError if the configuration is incomplete or out of range.
void validate(const ExperimentConfig& config);

enum class Verdict { kPass, kFail, kInconclusive };
std::string to_string(Verdict v);

struct Check {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<" (statistic must be below) or ">" (above)
  std::string provenance;
  Verdict verdict = Verdict::kPass;
  bool gating = true;  // non-gating checks are reported but do not set the exit status
};

/// Rows of the samples file: trajectory index plus one value per column.
struct SampleTable {
  std::vector<std::string> columns;  // value, coord_2, ...
  std::vector<std::vector<double>> rows;
};

struct SuiteReport {
  std::vector<Check> checks;
  SampleTable samples;
  std::vector<std::pair<std::string, std::string>> notes;
  Verdict verdict() const;
};

/// Run one suite (or a simulation) in memory.
SuiteReport run_suite(const ExperimentConfig& config);

/// Run and write manifest.txt, samples.csv and summary.json into config.out.
/// Returns the exit status: 0 pass, 1 fail, 2 inconclusive.
int run(const ExperimentConfig& config, std::ostream& log);

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 64;

}  // namespace dyson::cli
