#include "linespots/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace linespots {

namespace {

using nlohmann::json;

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  if (config.depth < 1) throw ConfigError("depth must be >= 1");
  if (config.future_length < 1)
    throw ConfigError("future_length must be >= 1");
  if (config.workers < 1) throw ConfigError("workers must be >= 1");
  if (config.algorithms.empty())
    throw ConfigError("at least one algorithm is required");
  for (const std::string& a : config.algorithms)
    if (a != "bugspots" && a != "linespots")
      throw ConfigError("unknown algorithm \"" + a + "\"");
  for (int n : config.e_inspect_thresholds)
    if (n < 1) throw ConfigError("e_inspect thresholds must be >= 1");
  for (double pi : config.aucec_pis)
    if (!(pi > 0.0 && pi <= 1.0))
      throw ConfigError("aucec pi values must be in (0, 1]");
  if (config.projects.empty()) throw ConfigError("no projects configured");
  std::set<std::string> names;
  for (const ProjectConfig& p : config.projects) {
    if (p.name.empty()) throw ConfigError("project without a name");
    if (!names.insert(p.name).second)
      throw ConfigError("duplicate project name \"" + p.name + "\"");
    if (p.path.empty())
      throw ConfigError("project " + p.name + " has no repository path");
    FixClassifier compiled(p.fix_regex);  // throws ConfigError when invalid
    if (p.origins.empty() && !p.sampling)
      throw ConfigError("project " + p.name +
                        " needs explicit origins or a sampling spec");
    if (p.sampling && (p.sampling->count < 0 || p.sampling->count > 3))
      throw ConfigError("project " + p.name +
                        ": sample count must be between 0 and 3");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }

  ExperimentConfig config;
  try {
    read_into(j, "depth", config.depth);
    read_into(j, "future_length", config.future_length);
    read_into(j, "algorithms", config.algorithms);
    read_into(j, "e_inspect_thresholds", config.e_inspect_thresholds);
    read_into(j, "aucec_pis", config.aucec_pis);
    read_into(j, "output_dir", config.output_dir);
    read_into(j, "workers", config.workers);
    if (auto it = j.find("strict"); it != j.end())
      config.strictness = it->get<bool>() ? ReplayStrictness::Strict
                                          : ReplayStrictness::Lenient;
    if (auto it = j.find("projects"); it != j.end()) {
      for (const json& pj : *it) {
        ProjectConfig p;
        read_into(pj, "name", p.name);
        read_into(pj, "path", p.path);
        read_into(pj, "fix_regex", p.fix_regex);
        read_into(pj, "language", p.language);
        read_into(pj, "origins", p.origins);
        if (auto s = pj.find("sample"); s != pj.end()) {
          SamplingSpec spec;
          read_into(*s, "count", spec.count);
          read_into(*s, "seed", spec.seed);
          p.sampling = spec;
        }
        config.projects.push_back(std::move(p));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }

  validate_config(config);
  return config;
}

}  // namespace linespots
