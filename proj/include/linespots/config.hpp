// config.hpp — declarative experiment configuration.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linespots/git_facade.hpp"
#include "linespots/prediction.hpp"

namespace linespots {

struct SamplingSpec {
  int count = 3;  // at most 3
  uint64_t seed = 0;
};

struct ProjectConfig {
  std::string name;
  std::string path;
  std::string fix_regex;
  std::string language;  // label only, carried into reports
  std::vector<std::string> origins;     // explicit origins, or
  std::optional<SamplingSpec> sampling; // sampled when no explicit origins
};

struct ExperimentConfig {
  int depth = 500;
  int future_length = 500;
  std::vector<std::string> algorithms = {"bugspots", "linespots"};
  std::vector<int> e_inspect_thresholds = {10, 100};
  std::vector<double> aucec_pis = {0.01, 0.05};
  std::string output_dir = "linespots-out";
  int workers = 1;
  ReplayStrictness strictness = ReplayStrictness::Lenient;
  std::vector<ProjectConfig> projects;
};

// Loads and validates a JSON config file. Throws ConfigError on unreadable
// files, malformed JSON, non-compiling fix patterns, or out-of-range
// parameters.
ExperimentConfig load_config(const std::string& path);

// Validation shared with programmatic construction.
void validate_config(const ExperimentConfig& config);

}  // namespace linespots
