#include "linespots/validation.hpp"

#include <set>

namespace linespots {

namespace {

// One tracked line of the identity map. origin_path < 0 marks a line
// created after the origin. text is carried only when content verification
// is enabled.
struct TrackedLine {
  int32_t origin_path = -1;
  int32_t origin_line = 0;
  std::string text;
};

class DesyncSet {
 public:
  DesyncSet(ReplayStrictness strictness, ReplayCounters* counters)
      : strictness_(strictness), counters_(counters) {}

  bool contains(const std::string& path) const { return set_.count(path) > 0; }

  void mark(const std::string& path, const LineTrackError& err) {
    if (strictness_ == ReplayStrictness::Strict) throw err;
    set_.insert(path);
    if (counters_) ++counters_->desynced_files;
  }

  void rename(const std::string& from, const std::string& to) {
    if (set_.erase(from) > 0) set_.insert(to);
  }
  void erase(const std::string& path) { set_.erase(path); }

 private:
  ReplayStrictness strictness_;
  ReplayCounters* counters_;
  std::set<std::string> set_;
};

}  // namespace

FaultSet build_fault_set(
    const OriginSample& sample,
    const std::vector<std::vector<FileDiff>>& future_diffs,
    const TreeSnapshot& origin_snapshot,
    const std::map<std::string, std::vector<std::string>>* origin_lines,
    ReplayStrictness strictness, ReplayCounters* counters) {
  const bool have_text = origin_lines != nullptr;

  FaultSet result;
  result.total_origin_lines = origin_snapshot.total_lines();

  // Seed the identity map from the origin checkout.
  std::vector<std::string> origin_paths;
  std::map<std::string, std::vector<TrackedLine>> state;
  for (const auto& [path, count] : origin_snapshot.line_counts) {
    int32_t path_id = static_cast<int32_t>(origin_paths.size());
    origin_paths.push_back(path);
    std::vector<TrackedLine> lines(static_cast<size_t>(count));
    const std::vector<std::string>* texts = nullptr;
    if (have_text) {
      auto it = origin_lines->find(path);
      if (it != origin_lines->end()) texts = &it->second;
    }
    for (size_t i = 0; i < lines.size(); ++i) {
      lines[i].origin_path = path_id;
      lines[i].origin_line = static_cast<int32_t>(i + 1);
      if (texts && i < texts->size()) lines[i].text = (*texts)[i];
    }
    state.emplace(path, std::move(lines));
  }

  DesyncSet desync(strictness, counters);

  for (size_t ci = 0; ci < sample.future_window.size(); ++ci) {
    const CommitRecord& commit = sample.future_window[ci];
    std::set<FaultLocation> commit_locations;

    for (const FileDiff& fd : future_diffs[ci]) {
      if (!fd.is_trackable()) continue;

      std::string path = fd.path();
      if (fd.status == FileStatus::Renamed) {
        auto it = state.find(*fd.old_path);
        if (it != state.end()) {
          state[path] = std::move(it->second);
          state.erase(*fd.old_path);
        }
        desync.rename(*fd.old_path, path);
      }
      if (fd.status == FileStatus::Deleted) path = *fd.old_path;

      if (desync.contains(path)) {
        if (fd.status == FileStatus::Deleted) {
          state.erase(path);
          desync.erase(path);
        }
        continue;
      }

      auto it = state.find(path);
      if (it == state.end()) {
        if (fd.status == FileStatus::Added) {
          it = state.emplace(path, std::vector<TrackedLine>{}).first;
        } else {
          // Untracked at origin (binary there, or created by a commit we
          // could not use); we cannot map its lines back.
          desync.mark(path,
                      LineTrackError("file " + path + " has no origin state"));
          continue;
        }
      }

      try {
        std::vector<TrackedLine> rebuilt = rebuild_through_diff(
            it->second, fd,
            [&](size_t, const DiffLine& line) {
              TrackedLine fresh;
              if (have_text) fresh.text = line.text;
              return fresh;
            },
            [&](size_t, const TrackedLine& gone) {
              if (commit.is_fix && gone.origin_path >= 0)
                commit_locations.insert(
                    {origin_paths[gone.origin_path], gone.origin_line});
            },
            [&](size_t, const TrackedLine& have, const DiffLine& want) {
              if (have_text && have.text != want.text)
                throw LineTrackError("tracked content mismatch in " + path +
                                     ": expected \"" + want.text +
                                     "\", have \"" + have.text + "\"");
            });

        // Pure-addition rule: a fix hunk that removes nothing tags the line
        // immediately following each inserted run.
        if (commit.is_fix) {
          for (const Hunk& h : fd.hunks) {
            bool any_removed = false, any_added = false;
            for (const DiffLine& l : h.lines) {
              any_removed |= l.kind == LineKind::Removed;
              any_added |= l.kind == LineKind::Added;
            }
            if (!any_added || any_removed) continue;
            for_each_added_run(h, [&](long /*run_begin*/, long run_end) {
              size_t follower = static_cast<size_t>(run_end) - 1;  // 0-based
              if (follower < rebuilt.size() &&
                  rebuilt[follower].origin_path >= 0)
                commit_locations.insert(
                    {origin_paths[rebuilt[follower].origin_path],
                     rebuilt[follower].origin_line});
            });
          }
        }

        if (fd.status == FileStatus::Deleted) {
          state.erase(path);
        } else {
          it->second = std::move(rebuilt);
        }
      } catch (const LineTrackError& err) {
        desync.mark(path, err);
      }
    }

    if (!commit_locations.empty()) {
      Fault fault;
      fault.fix_commit = commit.commit_id;
      fault.locations.assign(commit_locations.begin(), commit_locations.end());
      result.faults.push_back(std::move(fault));
    }
  }

  return result;
}

}  // namespace linespots
