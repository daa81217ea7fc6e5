#include "linespots/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace linespots {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// 0.01 -> "1", 0.05 -> "5", 0.125 -> "12.5"
std::string pi_suffix(double pi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", pi * 100.0);
  return buf;
}

struct SampleTask {
  size_t project_index;
  size_t sample_index;
  OriginSample sample;
  uint64_t seed;
};

EvaluationReport error_report(const ProjectConfig& project,
                              const std::string& origin,
                              const std::string& algorithm, uint64_t seed,
                              const std::string& message) {
  EvaluationReport r;
  r.project = project.name;
  r.origin = origin;
  r.algorithm = algorithm;
  r.seed = seed;
  std::string detail = message;
  for (char& c : detail)
    if (c == '\n' || c == '\r') c = ' ';
  r.status = "error: " + detail;
  return r;
}

}  // namespace

std::vector<std::vector<FileDiff>> collect_diffs(
    const std::string& repo_path, const std::vector<CommitRecord>& commits,
    ReplayStrictness strictness, int64_t* skipped_commits) {
  std::vector<std::vector<FileDiff>> diffs;
  diffs.reserve(commits.size());
  for (const CommitRecord& c : commits) {
    try {
      std::string raw = extract_diff_text(repo_path, c.commit_id, c.first_parent);
      diffs.push_back(parse_unified_diff(raw));
    } catch (const std::exception&) {
      if (strictness == ReplayStrictness::Strict) throw;
      diffs.emplace_back();
      if (skipped_commits) ++*skipped_commits;
    }
  }
  return diffs;
}

SampleEvaluation evaluate_sample(const ProjectConfig& project,
                                 const ExperimentConfig& config,
                                 const OriginSample& sample, uint64_t seed) {
  FixClassifier fix(project.fix_regex);
  OriginSample classified = sample;
  classify_commits(classified.window.commits, fix);
  classify_commits(classified.future_window, fix);

  ReplayCounters counters;
  std::vector<std::vector<FileDiff>> window_diffs = collect_diffs(
      project.path, classified.window.commits, config.strictness,
      &counters.skipped_commits);
  std::vector<std::vector<FileDiff>> future_diffs = collect_diffs(
      project.path, classified.future_window, config.strictness,
      &counters.skipped_commits);

  const CommitRecord& first = classified.window.commits.front();
  TreeSnapshot base_snapshot =
      first.first_parent ? snapshot_line_counts(project.path, *first.first_parent)
                         : TreeSnapshot{};
  TreeSnapshot origin_snapshot =
      snapshot_line_counts(project.path, classified.window.origin);

  std::map<std::string, std::vector<std::string>> origin_lines;
  const std::map<std::string, std::vector<std::string>>* origin_lines_ptr = nullptr;
  if (config.strictness == ReplayStrictness::Strict) {
    origin_lines = snapshot_file_lines(project.path, classified.window.origin);
    origin_lines_ptr = &origin_lines;
  }

  FaultSet faults =
      build_fault_set(classified, future_diffs, origin_snapshot,
                      origin_lines_ptr, config.strictness, &counters);

  int64_t fix_count = 0;
  for (const CommitRecord& c : classified.window.commits)
    if (c.is_fix) ++fix_count;

  WindowReplay replay;
  replay.window = &classified.window;
  replay.diffs = &window_diffs;
  replay.base_snapshot = &base_snapshot;
  replay.origin_snapshot = &origin_snapshot;

  SampleEvaluation evaluation;
  for (const std::string& algorithm : config.algorithms) {
    EvaluationReport report;
    report.project = project.name;
    report.origin = classified.window.origin;
    report.algorithm = algorithm;
    report.seed = seed;
    report.loc = origin_snapshot.total_lines();
    report.fix_count = fix_count;

    RankedList ranking;
    report.runtime_seconds = measure_runtime_seconds([&] {
      ranking = algorithm == "bugspots"
                    ? run_bugspots(replay, config.strictness, &counters)
                    : run_linespots(replay, config.strictness, &counters);
    });
    RankedList line_ranking =
        ranking.granularity == Granularity::Line
            ? std::move(ranking)
            : project_to_lines(ranking, origin_snapshot.line_counts);

    if (faults.faults.empty()) {
      report.status = "empty-fault-set";
    } else {
      report.auroc = auroc(line_ranking, faults);
      report.exam = exam_score(line_ranking, faults, faults.total_origin_lines);
      std::vector<std::optional<double>*> aucec_cells = {&report.aucec1,
                                                         &report.aucec5};
      for (size_t i = 0; i < config.aucec_pis.size() && i < aucec_cells.size();
           ++i)
        *aucec_cells[i] =
            normalized_aucec(line_ranking, faults, config.aucec_pis[i]);
      std::vector<std::optional<double>*> einspect_cells = {
          &report.einspect_at_10, &report.einspect_at_100};
      for (size_t i = 0;
           i < config.e_inspect_thresholds.size() && i < einspect_cells.size();
           ++i)
        *einspect_cells[i] = static_cast<double>(e_inspect_at_n(
            line_ranking, faults, config.e_inspect_thresholds[i]));
      report.einspect_f = e_inspect_first(line_ranking, faults);
      evaluation.curves.emplace_back(algorithm,
                                     cost_curve(line_ranking, faults));
    }
    evaluation.reports.push_back(std::move(report));
  }
  return evaluation;
}

std::string report_csv_header(const ExperimentConfig& config) {
  std::string header = "project,origin,algorithm,loc,fix_count,auroc,exam";
  std::vector<std::string> pi_names;
  for (size_t i = 0; i < 2; ++i)
    header += ",aucec" + (i < config.aucec_pis.size()
                              ? pi_suffix(config.aucec_pis[i])
                              : std::to_string(i));
  for (size_t i = 0; i < 2; ++i)
    header += ",einspect@" + (i < config.e_inspect_thresholds.size()
                                  ? std::to_string(config.e_inspect_thresholds[i])
                                  : std::to_string(i));
  header += ",einspect_f,runtime_seconds,status\n";
  return header;
}

std::string report_csv_row(const EvaluationReport& r,
                           const ExperimentConfig&) {
  std::string row;
  row += csv_escape(r.project);
  row += ',';
  row += r.origin;
  row += ',';
  row += r.algorithm;
  row += ',';
  row += std::to_string(r.loc);
  row += ',';
  row += std::to_string(r.fix_count);
  row += ',';
  row += format_cell(r.auroc);
  row += ',';
  row += format_cell(r.exam);
  row += ',';
  row += format_cell(r.aucec1);
  row += ',';
  row += format_cell(r.aucec5);
  row += ',';
  row += format_cell(r.einspect_at_10);
  row += ',';
  row += format_cell(r.einspect_at_100);
  row += ',';
  row += format_cell(r.einspect_f);
  row += ',';
  row += format_double(r.runtime_seconds);
  row += ',';
  row += csv_escape(r.status);
  row += '\n';
  return row;
}

std::string ranking_csv(const RankedList& ranking) {
  std::string out = "rank,path,line,score\n";
  size_t rank = 1;
  for (const RankedEntry& e : ranking.entries) {
    out += std::to_string(rank++);
    out += ',';
    out += csv_escape(ranking.path_of(e));
    out += ',';
    if (ranking.granularity == Granularity::Line)
      out += std::to_string(e.line);
    out += ',';
    out += format_double(e.score);
    out += '\n';
  }
  return out;
}

std::string sample_origins_csv(const ExperimentConfig& config,
                               std::vector<std::string>& warnings) {
  std::string out = "project,origin,seed\n";
  for (const ProjectConfig& project : config.projects) {
    if (!project.origins.empty()) {
      for (const std::string& origin : project.origins)
        out += csv_escape(project.name) + "," + origin + ",0\n";
      continue;
    }
    if (!project.sampling) continue;
    try {
      std::vector<OriginSample> samples =
          sample_origins(project.path, project.sampling->count, config.depth,
                         config.future_length, project.sampling->seed);
      for (const OriginSample& s : samples)
        out += csv_escape(project.name) + "," + s.origin + "," +
               std::to_string(project.sampling->seed) + "\n";
    } catch (const std::exception& e) {
      warnings.push_back("project " + project.name + ": " + e.what());
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* log) {
  validate_config(config);
  ExperimentResult result;

  // Materialize every origin sample up front.
  std::vector<SampleTask> tasks;
  for (size_t pi = 0; pi < config.projects.size(); ++pi) {
    const ProjectConfig& project = config.projects[pi];
    try {
      if (!project.origins.empty()) {
        std::vector<ChainCommit> chain =
            load_first_parent_chain(project.path, "HEAD");
        for (size_t si = 0; si < project.origins.size(); ++si) {
          AnalysisWindow window = linearize_history(
              project.path, project.origins[si], config.depth);
          size_t pos = chain.size();
          for (size_t i = 0; i < chain.size(); ++i)
            if (chain[i].id == window.origin) {
              pos = i;
              break;
            }
          if (pos == chain.size())
            throw GitError("origin " + project.origins[si] +
                           " is not on the first-parent chain of HEAD");
          OriginSample sample;
          sample.origin = window.origin;
          sample.window = std::move(window);
          size_t future_end = std::min(
              chain.size(), pos + 1 + static_cast<size_t>(config.future_length));
          for (size_t i = pos + 1; i < future_end; ++i) {
            CommitRecord r;
            r.commit_id = chain[i].id;
            r.first_parent = chain[i].first_parent;
            r.index = static_cast<int>(i - pos - 1);
            r.message = chain[i].message;
            sample.future_window.push_back(std::move(r));
          }
          tasks.push_back({pi, si, std::move(sample), 0});
        }
      } else if (project.sampling) {
        std::vector<OriginSample> samples =
            sample_origins(project.path, project.sampling->count, config.depth,
                           config.future_length, project.sampling->seed);
        for (size_t si = 0; si < samples.size(); ++si)
          tasks.push_back(
              {pi, si, std::move(samples[si]), project.sampling->seed});
      }
    } catch (const std::exception& e) {
      result.warnings.push_back("project " + project.name + ": " + e.what());
    }
  }

  // Evaluate tasks with a fixed-size worker pool; results keep task order.
  std::vector<SampleEvaluation> evaluations(tasks.size());
  std::vector<std::string> failures(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const SampleTask& task = tasks[i];
      try {
        evaluations[i] =
            evaluate_sample(config.projects[task.project_index], config,
                            task.sample, task.seed);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  int n_workers = std::max(1, std::min<int>(config.workers,
                                            static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  for (size_t i = 0; i < tasks.size(); ++i) {
    const SampleTask& task = tasks[i];
    const ProjectConfig& project = config.projects[task.project_index];
    if (!failures[i].empty()) {
      for (const std::string& algorithm : config.algorithms) {
        result.reports.push_back(error_report(
            project, task.sample.origin, algorithm, task.seed, failures[i]));
        ++result.error_rows;
      }
      continue;
    }
    for (EvaluationReport& r : evaluations[i].reports) {
      if (r.status == "empty-fault-set") ++result.empty_fault_rows;
      result.reports.push_back(std::move(r));
    }
  }

  // Emit report.csv and per-sample curve files.
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(config.output_dir) / "curves");
  std::ofstream report(fs::path(config.output_dir) / "report.csv",
                       std::ios::binary);
  if (!report)
    throw ConfigError("cannot write report under " + config.output_dir);
  report << report_csv_header(config);
  for (const EvaluationReport& r : result.reports)
    report << report_csv_row(r, config);
  report.close();

  for (size_t i = 0; i < tasks.size(); ++i) {
    const SampleTask& task = tasks[i];
    const ProjectConfig& project = config.projects[task.project_index];
    for (const auto& [algorithm, curve] : evaluations[i].curves) {
      fs::path file = fs::path(config.output_dir) / "curves" /
                      (project.name + "__" + task.sample.origin + "__" +
                       algorithm + ".csv");
      std::ofstream out(file, std::ios::binary);
      for (const auto& [x, y] : curve.points)
        out << format_double(x) << ' ' << format_double(y) << '\n';
    }
  }

  if (log) {
    for (const std::string& w : result.warnings) *log << "warning: " << w << '\n';
    *log << "report rows: " << result.reports.size()
         << " (errors: " << result.error_rows
         << ", empty fault sets: " << result.empty_fault_rows << ")\n";
  }
  return result;
}

}  // namespace linespots
