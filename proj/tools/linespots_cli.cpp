// linespots_cli.cpp — command line front end: analyze one origin, run batch
// evaluations, or sample origins for a configured experiment.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "linespots/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

int cmd_analyze(const std::string& repo, const std::string& origin, int depth,
                const std::string& regex, const std::string& algorithm,
                const std::string& output) {
  using namespace linespots;
  FixClassifier fix(regex);
  AnalysisWindow window = linearize_history(repo, origin, depth, &fix);

  int64_t skipped = 0;
  std::vector<std::vector<FileDiff>> diffs = collect_diffs(
      repo, window.commits, ReplayStrictness::Lenient, &skipped);
  const CommitRecord& first = window.commits.front();
  TreeSnapshot base = first.first_parent
                          ? snapshot_line_counts(repo, *first.first_parent)
                          : TreeSnapshot{};
  TreeSnapshot origin_snapshot = snapshot_line_counts(repo, window.origin);

  WindowReplay replay{&window, &diffs, &base, &origin_snapshot};
  RankedList ranking = algorithm == "bugspots" ? run_bugspots(replay)
                                               : run_linespots(replay);
  std::string csv = ranking_csv(ranking);
  if (output == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + output);
    out << csv;
  }
  if (skipped > 0)
    std::cerr << "warning: skipped " << skipped << " commits with unusable diffs\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Past-fault prediction over git histories (Bugspots and Linespots)"};
  app.require_subcommand(1);

  // analyze
  std::string repo, origin, regex, algorithm = "linespots", output = "-";
  int depth = 500;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Rank one repository at one origin");
  analyze->add_option("--repo", repo, "Path to a local git repository")
      ->required();
  analyze->add_option("--origin", origin, "Commit to predict from")->required();
  analyze->add_option("--depth", depth, "History window size");
  analyze->add_option("--regex", regex, "Fix-commit message pattern")
      ->required();
  analyze->add_option("--algorithm", algorithm, "bugspots or linespots")
      ->check(CLI::IsMember({"bugspots", "linespots"}));
  analyze->add_option("--output", output, "Output file ('-' for stdout)");

  // evaluate
  std::string config_path, output_dir_override;
  int workers_override = 0, depth_override = 0, future_override = 0;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Run the configured experiment batch");
  evaluate->add_option("--config", config_path, "JSON experiment config")
      ->required();
  evaluate->add_option("--output-dir", output_dir_override,
                       "Override the configured output directory");
  evaluate->add_option("--workers", workers_override,
                       "Override the configured worker count");
  evaluate->add_option("--depth", depth_override,
                       "Override the configured window depth");
  evaluate->add_option("--future-length", future_override,
                       "Override the configured future window length");

  // sample-origins
  std::string sample_config_path, origins_output;
  CLI::App* sample = app.add_subcommand(
      "sample-origins", "Sample reproducible origins for configured projects");
  sample->add_option("--config", sample_config_path, "JSON experiment config")
      ->required();
  sample->add_option("--output", origins_output,
                     "Origins file (default <output_dir>/origins.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed())
      return cmd_analyze(repo, origin, depth, regex, algorithm, output);

    if (evaluate->parsed()) {
      linespots::ExperimentConfig config = linespots::load_config(config_path);
      if (!output_dir_override.empty()) config.output_dir = output_dir_override;
      if (workers_override > 0) config.workers = workers_override;
      if (depth_override > 0) config.depth = depth_override;
      if (future_override > 0) config.future_length = future_override;
      linespots::ExperimentResult result =
          linespots::run_experiment(config, &std::cerr);
      return (result.error_rows > 0 || !result.warnings.empty()) ? kExitPartial
                                                                 : kExitOk;
    }

    if (sample->parsed()) {
      linespots::ExperimentConfig config =
          linespots::load_config(sample_config_path);
      std::vector<std::string> warnings;
      std::string csv = linespots::sample_origins_csv(config, warnings);
      std::filesystem::path out_path =
          origins_output.empty()
              ? std::filesystem::path(config.output_dir) / "origins.csv"
              : std::filesystem::path(origins_output);
      std::filesystem::create_directories(out_path.parent_path());
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw linespots::ConfigError("cannot write " + out_path.string());
      out << csv;
      for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
      return warnings.empty() ? kExitOk : kExitPartial;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
