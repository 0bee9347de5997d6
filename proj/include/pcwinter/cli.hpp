#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcwinter/utility.hpp"

namespace pcwinter {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitIntegrity = 4,
  kExitBudget = 5,
};

inline const std::vector<std::string> kMethods = {
    "pc-winter", "pc-winter-l", "pc-winter-p", "data-shapley", "loo-node",
    "loo-edge",  "degree",      "random",      "betweenness"};

using ConfigMap = std::map<std::string, std::string>;

struct RunConfig {
  std::filesystem::path dataset;
  bool normalize = true;
  int depth = 2;
  std::vector<double> trunc{0.5, 0.7};
  TrainConfig train;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> max_perms;
  std::optional<double> max_seconds;
  std::size_t window = 20;
  double tol = 0.05;
  std::string method = "pc-winter";
  std::filesystem::path out;
  unsigned threads = 1;
  double tmc_tolerance = 0.01;
  std::uint64_t checkpoint_every = 10;
  std::uint64_t stop_after = 0;
  double step = 0.05;
  unsigned repeats = 5;

  // Canonical key=value text of every setting that affects results.
  std::string canonical() const;
};

// Flat key=value file; '#' starts a comment. Throws ConfigError on unknown
// keys and ParseError on malformed lines.
ConfigMap read_config_file(const std::filesystem::path& file);
// Defaults overlaid with `values`; every field is validated.
RunConfig resolve_config(const ConfigMap& values);
void write_config_file(const RunConfig& cfg, const std::filesystem::path& file);

// Output root: explicit value, else $PCWINTER_OUTPUT_ROOT, else ./runs.
std::filesystem::path output_root(const std::filesystem::path& explicit_root);

// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace pcwinter
