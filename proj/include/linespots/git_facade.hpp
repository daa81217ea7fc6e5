// git_facade.hpp — read-only access to git repositories: linear history
// windows, fix-commit classification, raw diff extraction, origin sampling
// and tree snapshots.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace linespots {

class GitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommitRecord {
  std::string commit_id;
  std::optional<std::string> first_parent;
  int index = 0;  // position in its window: 0 = oldest
  std::string message;
  bool is_fix = false;
};

struct AnalysisWindow {
  std::string origin;  // full commit id, equals commits.back().commit_id
  int depth = 0;
  std::vector<CommitRecord> commits;  // oldest -> newest
};

struct OriginSample {
  std::string origin;
  AnalysisWindow window;
  std::vector<CommitRecord> future_window;  // strictly after origin, oldest first
};

// A fix-message pattern, compiled once at configuration time. Matching is
// case-insensitive and multi-line: every line of the message is a match
// candidate, and an unanchored pattern matches anywhere.
class FixClassifier {
 public:
  explicit FixClassifier(const std::string& pattern);
  bool matches(const std::string& message) const;
  const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::regex regex_;
};

inline bool classify_fix(const std::string& message, const FixClassifier& fix) {
  return fix.matches(message);
}

// One entry of a repository's first-parent chain.
struct ChainCommit {
  std::string id;
  std::optional<std::string> first_parent;
  std::string message;
};

// First-parent chain ending at `tip`, oldest first. max_count < 0 loads the
// whole chain.
std::vector<ChainCommit> load_first_parent_chain(const std::string& repo_path,
                                                 const std::string& tip,
                                                 long max_count = -1);

// Last `depth` commits of the first-parent chain ending at origin, oldest
// first, indexed 0..n-1. Classifies fix commits when `fix` is given.
AnalysisWindow linearize_history(const std::string& repo_path,
                                 const std::string& origin, int depth,
                                 const FixClassifier* fix = nullptr);

void classify_commits(std::vector<CommitRecord>& commits,
                      const FixClassifier& fix);

// Unified diff of `commit_id` against `first_parent` (empty tree when
// absent): histogram algorithm, 3 context lines, rename detection.
std::string extract_diff_text(const std::string& repo_path,
                              const std::string& commit_id,
                              const std::optional<std::string>& first_parent);

// Same, resolving the first parent via the repository.
std::string extract_diff_text(const std::string& repo_path,
                              const std::string& commit_id);

// Up to `count` (≤ 3) origins sampled from the full first-parent history of
// HEAD such that no two samples' windows or future windows overlap.
// Deterministic for a fixed seed. Windows always span the full depth and
// future windows the full future_length; fewer samples are returned when no
// further non-overlapping placement exists.
std::vector<OriginSample> sample_origins(const std::string& repo_path,
                                         int count, int depth,
                                         int future_length, uint64_t seed);

// Per-file line counts of the text blobs in a tree. Binary blobs (NUL byte
// within the first 8000 bytes), symlinks and submodule pointers are
// excluded.
struct TreeSnapshot {
  std::map<std::string, int64_t> line_counts;

  int64_t total_lines() const {
    int64_t n = 0;
    for (const auto& [_, c] : line_counts) n += c;
    return n;
  }
};

TreeSnapshot snapshot_line_counts(const std::string& repo_path,
                                  const std::string& treeish);

// Full text content of a tree, split into lines (same file filter as
// snapshot_line_counts). Used by oracles and strict validation.
std::map<std::string, std::vector<std::string>> snapshot_file_lines(
    const std::string& repo_path, const std::string& treeish);

// Well-known id of git's empty tree.
extern const char kEmptyTreeId[];

}  // namespace linespots
