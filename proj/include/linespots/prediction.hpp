// prediction.hpp — the Bugspots and Linespots scoring algorithms over an
// analysis window, plus the file-to-line ranking transform.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "linespots/diff.hpp"
#include "linespots/git_facade.hpp"

namespace linespots {

// Sigmoid age weight 1/(1+exp(-12t+12)) with t = index/(window_size-1);
// a window of size 1 uses t = 1. Strictly increasing in index, 0.5 at the
// newest commit.
double age_weight(int index, int window_size);

using WeightFn = std::function<double(int index, int window_size)>;

enum class Granularity : uint8_t { File, Line };

struct RankedEntry {
  int32_t path_id = 0;
  int32_t line = 0;  // 1-based for line granularity, 0 for file granularity
  double score = 0.0;
};

// Maximal run of equal-scored entries; ranks covered are
// [first+1, first+count] (1-based).
struct TieGroup {
  size_t first = 0;
  size_t count = 0;
};

struct RankedList {
  Granularity granularity = Granularity::Line;
  std::vector<std::string> paths;    // path_id -> path
  std::vector<RankedEntry> entries;  // score desc, then (path asc, line asc)
  std::vector<TieGroup> tie_groups;

  // Sorts entries and recomputes tie groups (exact score equality).
  static RankedList build(Granularity granularity,
                          std::vector<std::string> paths,
                          std::vector<RankedEntry> entries);

  const std::string& path_of(const RankedEntry& e) const {
    return paths[static_cast<size_t>(e.path_id)];
  }
};

enum class ReplayStrictness : uint8_t { Strict, Lenient };

// Accounting for inputs a replay could not use. In strict mode the first
// such event throws instead.
struct ReplayCounters {
  int64_t skipped_commits = 0;    // unparsable diffs (counted by the caller)
  int64_t desynced_files = 0;     // coordinate mismatch during replay
  int64_t reconciled_files = 0;   // state discarded at origin reconciliation
};

// Everything a scoring replay consumes. Diffs are parsed up front so both
// algorithms are timed over identical inputs.
struct WindowReplay {
  const AnalysisWindow* window = nullptr;
  const std::vector<std::vector<FileDiff>>* diffs = nullptr;  // per commit
  const TreeSnapshot* base_snapshot = nullptr;    // tree before the window
  const TreeSnapshot* origin_snapshot = nullptr;  // tree at origin
};

// File-granularity ranking: each file accumulates the age weight of every
// fix commit that touched it; renames are followed; files existing at
// origin but never touched score 0.
RankedList run_bugspots(const WindowReplay& input,
                        ReplayStrictness strictness = ReplayStrictness::Lenient,
                        ReplayCounters* counters = nullptr,
                        const WeightFn& weight = age_weight);

// Line-granularity ranking: replays every commit's hunks over per-line
// score vectors (removed lines drop their score, added lines start from the
// hunk's mean old-side score) and adds the age weight across the full new
// side of every fix hunk.
RankedList run_linespots(const WindowReplay& input,
                         ReplayStrictness strictness = ReplayStrictness::Lenient,
                         ReplayCounters* counters = nullptr,
                         const WeightFn& weight = age_weight);

// Expands a file ranking to line granularity, giving every line its file's
// score. Throws std::invalid_argument when a ranked file has no length.
RankedList project_to_lines(const RankedList& file_ranking,
                            const std::map<std::string, int64_t>& file_lengths);

}  // namespace linespots
