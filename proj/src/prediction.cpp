#include "linespots/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace linespots {

double age_weight(int index, int window_size) {
  double t = window_size == 1
                 ? 1.0
                 : static_cast<double>(index) / static_cast<double>(window_size - 1);
  return 1.0 / (1.0 + std::exp(-12.0 * t + 12.0));
}

RankedList RankedList::build(Granularity granularity,
                             std::vector<std::string> paths,
                             std::vector<RankedEntry> entries) {
  RankedList list;
  list.granularity = granularity;
  list.paths = std::move(paths);
  list.entries = std::move(entries);
  std::sort(list.entries.begin(), list.entries.end(),
            [&](const RankedEntry& a, const RankedEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.path_id != b.path_id)
                return list.paths[a.path_id] < list.paths[b.path_id];
              return a.line < b.line;
            });
  size_t i = 0;
  while (i < list.entries.size()) {
    size_t j = i + 1;
    while (j < list.entries.size() &&
           list.entries[j].score == list.entries[i].score)
      ++j;
    list.tie_groups.push_back({i, j - i});
    i = j;
  }
  return list;
}

namespace {

class DesyncTracker {
 public:
  DesyncTracker(ReplayStrictness strictness, ReplayCounters* counters)
      : strictness_(strictness), counters_(counters) {}

  bool is_desynced(const std::string& path) const {
    return desynced_.count(path) > 0;
  }

  void mark(const std::string& path, const LineTrackError& err) {
    if (strictness_ == ReplayStrictness::Strict) throw err;
    desynced_.insert(path);
    if (counters_) ++counters_->desynced_files;
  }

  void rename(const std::string& from, const std::string& to) {
    if (desynced_.erase(from) > 0) desynced_.insert(to);
  }

  void erase(const std::string& path) { desynced_.erase(path); }

 private:
  ReplayStrictness strictness_;
  ReplayCounters* counters_;
  std::set<std::string> desynced_;
};

}  // namespace

RankedList run_bugspots(const WindowReplay& input, ReplayStrictness,
                        ReplayCounters*, const WeightFn& weight) {
  const AnalysisWindow& window = *input.window;
  const int n = static_cast<int>(window.commits.size());
  std::map<std::string, double> scores;  // currently existing touched files

  for (size_t ci = 0; ci < window.commits.size(); ++ci) {
    const CommitRecord& commit = window.commits[ci];
    const double w = weight(commit.index, n);
    for (const FileDiff& fd : (*input.diffs)[ci]) {
      if (fd.is_submodule()) continue;
      if (fd.status == FileStatus::Deleted) {
        scores.erase(*fd.old_path);
        continue;
      }
      if (fd.status == FileStatus::Renamed) {
        auto it = scores.find(*fd.old_path);
        if (it != scores.end()) {
          double carried = it->second;
          scores.erase(it);
          scores[*fd.new_path] += carried;
        }
      }
      if (commit.is_fix) scores[fd.path()] += w;
    }
  }

  std::vector<std::string> paths;
  std::vector<RankedEntry> entries;
  paths.reserve(input.origin_snapshot->line_counts.size());
  for (const auto& [path, _] : input.origin_snapshot->line_counts) {
    int32_t id = static_cast<int32_t>(paths.size());
    paths.push_back(path);
    auto it = scores.find(path);
    entries.push_back({id, 0, it == scores.end() ? 0.0 : it->second});
  }
  return RankedList::build(Granularity::File, std::move(paths),
                           std::move(entries));
}

RankedList run_linespots(const WindowReplay& input, ReplayStrictness strictness,
                         ReplayCounters* counters, const WeightFn& weight) {
  const AnalysisWindow& window = *input.window;
  const int n = static_cast<int>(window.commits.size());
  std::map<std::string, std::vector<double>> state;  // touched files only
  DesyncTracker desync(strictness, counters);

  for (size_t ci = 0; ci < window.commits.size(); ++ci) {
    const CommitRecord& commit = window.commits[ci];
    const double w = weight(commit.index, n);
    for (const FileDiff& fd : (*input.diffs)[ci]) {
      if (!fd.is_trackable()) continue;
      if (fd.status == FileStatus::Deleted) {
        state.erase(*fd.old_path);
        desync.erase(*fd.old_path);
        continue;
      }
      std::string path = fd.path();
      if (fd.status == FileStatus::Renamed) {
        auto it = state.find(*fd.old_path);
        if (it != state.end()) {
          state[path] = std::move(it->second);
          state.erase(*fd.old_path);
        }
        desync.rename(*fd.old_path, path);
      }
      if (desync.is_desynced(path)) continue;

      auto it = state.find(path);
      if (it == state.end()) {
        // First sight of this file: before its first diff it has the line
        // count it had at the window base, all scores zero.
        std::vector<double> fresh;
        if (fd.status != FileStatus::Added) {
          auto base = input.base_snapshot->line_counts.find(
              fd.status == FileStatus::Renamed ? *fd.old_path : path);
          if (base == input.base_snapshot->line_counts.end()) {
            desync.mark(path, LineTrackError("file " + path +
                                             " has no window-base state"));
            continue;
          }
          fresh.assign(static_cast<size_t>(base->second), 0.0);
        }
        it = state.emplace(path, std::move(fresh)).first;
      }

      std::vector<double>& scores = it->second;
      try {
        std::vector<double> hunk_means(fd.hunks.size(), 0.0);
        for (size_t hi = 0; hi < fd.hunks.size(); ++hi) {
          const Hunk& h = fd.hunks[hi];
          if (h.old_count == 0) continue;
          if (hunk_old_end(h) > scores.size())
            throw LineTrackError("hunk old side beyond end of score vector");
          double sum = 0.0;
          for (size_t i = hunk_old_begin(h); i < hunk_old_end(h); ++i)
            sum += scores[i];
          hunk_means[hi] = sum / static_cast<double>(h.old_count);
        }
        std::vector<double> rebuilt = rebuild_through_diff(
            scores, fd,
            [&](size_t hi, const DiffLine&) { return hunk_means[hi]; });
        if (commit.is_fix) {
          for (const Hunk& h : fd.hunks)
            for (size_t i = hunk_new_begin(h); i < hunk_new_end(h); ++i)
              rebuilt[i] += w;
        }
        scores = std::move(rebuilt);
      } catch (const LineTrackError& err) {
        desync.mark(path, err);
      }
    }
  }

  // Rank every line existing at origin. Files whose replayed state does not
  // line up with the origin checkout fall back to zero scores.
  std::vector<std::string> paths;
  std::vector<RankedEntry> entries;
  entries.reserve(static_cast<size_t>(input.origin_snapshot->total_lines()));
  for (const auto& [path, count] : input.origin_snapshot->line_counts) {
    int32_t id = static_cast<int32_t>(paths.size());
    paths.push_back(path);
    auto it = state.find(path);
    const std::vector<double>* scores = nullptr;
    if (it != state.end() && !desync.is_desynced(path)) {
      if (it->second.size() == static_cast<size_t>(count)) {
        scores = &it->second;
      } else {
        LineTrackError err("file " + path + " replayed to " +
                           std::to_string(it->second.size()) +
                           " lines, origin has " + std::to_string(count));
        if (strictness == ReplayStrictness::Strict) throw err;
        if (counters) ++counters->reconciled_files;
      }
    }
    for (int64_t line = 1; line <= count; ++line)
      entries.push_back({id, static_cast<int32_t>(line),
                         scores ? (*scores)[static_cast<size_t>(line - 1)] : 0.0});
  }
  return RankedList::build(Granularity::Line, std::move(paths),
                           std::move(entries));
}

RankedList project_to_lines(const RankedList& file_ranking,
                            const std::map<std::string, int64_t>& file_lengths) {
  std::vector<RankedEntry> entries;
  for (const RankedEntry& e : file_ranking.entries) {
    auto it = file_lengths.find(file_ranking.path_of(e));
    if (it == file_lengths.end())
      throw std::invalid_argument("no line count for ranked file " +
                                  file_ranking.path_of(e));
    for (int64_t line = 1; line <= it->second; ++line)
      entries.push_back({e.path_id, static_cast<int32_t>(line), e.score});
  }
  return RankedList::build(Granularity::Line, file_ranking.paths,
                           std::move(entries));
}

}  // namespace linespots
