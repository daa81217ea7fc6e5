// validation.hpp — ground-truth fault sets built by replaying the
// pseudo-future and tracking which origin lines later fix commits remove.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "linespots/diff.hpp"
#include "linespots/git_facade.hpp"
#include "linespots/prediction.hpp"

namespace linespots {

struct FaultLocation {
  std::string path;  // path at origin
  int32_t line = 0;  // 1-based line number at origin

  friend auto operator<=>(const FaultLocation&, const FaultLocation&) = default;
};

// All origin lines implicated by one future fix commit.
struct Fault {
  std::string fix_commit;
  std::vector<FaultLocation> locations;  // unique, sorted
};

struct FaultSet {
  std::vector<Fault> faults;  // ordered by fix commit position in the future
  int64_t total_origin_lines = 0;
};

// Replays the future window over an identity map seeded at the origin
// checkout. A removed line that still maps to an origin line charges that
// location to the removing fix commit; a fix hunk that only inserts lines
// charges the line immediately following each inserted run. Fix commits
// contributing no origin locations produce no Fault.
//
// `origin_lines`, when given, enables byte-level verification of context
// and removed lines against the tracked state (used by tests and strict
// runs). future_window commits must already carry their is_fix flags.
FaultSet build_fault_set(
    const OriginSample& sample,
    const std::vector<std::vector<FileDiff>>& future_diffs,
    const TreeSnapshot& origin_snapshot,
    const std::map<std::string, std::vector<std::string>>* origin_lines = nullptr,
    ReplayStrictness strictness = ReplayStrictness::Lenient,
    ReplayCounters* counters = nullptr);

}  // namespace linespots
