// pipeline.hpp — batch orchestration: mine windows, build fault sets, run
// both algorithms, compute metrics, and emit machine-readable reports.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "linespots/config.hpp"
#include "linespots/metrics.hpp"
#include "linespots/validation.hpp"

namespace linespots {

// Extracts and parses the diff of every commit. In lenient mode a commit
// whose diff cannot be extracted or parsed yields an empty entry and bumps
// *skipped_commits; in strict mode it throws.
std::vector<std::vector<FileDiff>> collect_diffs(
    const std::string& repo_path, const std::vector<CommitRecord>& commits,
    ReplayStrictness strictness, int64_t* skipped_commits = nullptr);

struct SampleEvaluation {
  std::vector<EvaluationReport> reports;  // one per configured algorithm
  // cost curves for rows that have faults, keyed by algorithm
  std::vector<std::pair<std::string, CostCurve>> curves;
};

// Runs every configured algorithm over one origin sample. Throws on
// repository-level failures; the caller converts those into error rows.
SampleEvaluation evaluate_sample(const ProjectConfig& project,
                                 const ExperimentConfig& config,
                                 const OriginSample& sample, uint64_t seed);

struct ExperimentResult {
  std::vector<EvaluationReport> reports;
  std::vector<std::string> warnings;  // project-level problems
  int error_rows = 0;
  int empty_fault_rows = 0;
};

// Evaluates every (project x origin x algorithm) combination, writing
// report.csv and per-sample curve files under config.output_dir. Report
// rows are ordered by (project, sample, algorithm) position regardless of
// worker scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* log = nullptr);

// Origin sampling for every project with a sampling spec; returns CSV text
// ("project,origin,seed") and appends warnings for repositories that are
// too short.
std::string sample_origins_csv(const ExperimentConfig& config,
                               std::vector<std::string>& warnings);

std::string report_csv_header(const ExperimentConfig& config);
std::string report_csv_row(const EvaluationReport& report,
                           const ExperimentConfig& config);

// Serializes a ranking as "rank,path,line,score" rows (line empty at file
// granularity).
std::string ranking_csv(const RankedList& ranking);

}  // namespace linespots
