#pragma once

// Config-driven experiment runner behind the `solgeom` command line tool.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "solgeom/group.hpp"
#include "solgeom/metric.hpp"

namespace solgeom {

inline constexpr const char *kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitBudget = 3, kExitProbeFailure = 4 };

/// Bad config or command line.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A probe ran but its result is a failure (axiom violation, lemma failure,
/// decomposition failure).
class ProbeFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class GenSetKind { Standard, Good, Explicit };

struct ExperimentConfig {
  /// the file as given, echoed into every output header
  std::string text;

  Family family = Family::Z16;
  std::uint32_t q = 2;
  Matrix2 matrix;

  GenSetKind genset = GenSetKind::Standard;
  std::string letters; // explicit: "m:k; m:k; ..."

  int radius = 8;
  std::string ball_file = "ball.bin";

  std::optional<int> ac_J; // nullopt = derived from the quarter fit
  int ac_n_min = 1;
  int ac_n_max = 3;
  std::optional<std::string> ac_a;

  int depth_i_min = 0;
  int depth_i_max = 4;
  std::optional<std::string> depth_a;

  std::size_t lemma_samples = 1000;
  std::size_t lemma_fit_samples = 1000;
  int lemma_max_length = 30;
  bool lemma_upper = true;
  std::optional<double> lemma_D; // nullopt = fitted

  std::size_t valuation_samples = 1000;
  std::optional<double> valuation_tolerance;

  std::uint64_t seed = 1;
};

/// INI-style text: `[section]` headers, `key = value` lines, `#` comments.
/// Every key has a default; unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Documented keys, as (section.key, description) pairs.
const std::vector<std::pair<std::string, std::string>> &config_keys();

Group build_group(const ExperimentConfig &cfg);
GenSet build_genset(const ExperimentConfig &cfg, const Group &group);

struct RunOptions {
  std::filesystem::path out = ".";
  unsigned workers = 1;
  std::size_t memory_budget = std::size_t{2} << 30;
};

inline const std::vector<std::string> kCommands = {"ball",           "ac-probe",    "depth-probe",
                                                   "valuation-check", "lemma-check", "quarter-fit"};

/// Output file written by a command, relative to RunOptions::out.
std::string output_name(const std::string &command);

/// `# ` block: tool version, command, family, R, seed and the config text.
std::string csv_header(const ExperimentConfig &cfg, const std::string &command);

/// Runs one command and returns its exit code. Errors are reported on `err`.
int run_command(const std::string &command, const ExperimentConfig &cfg, const RunOptions &opts,
                std::ostream &err);

} // namespace solgeom
