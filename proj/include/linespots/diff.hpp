// diff.hpp — structured view of unified diff text plus the line-walk
// machinery that score replay, fault tracking and patch application share.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace linespots {

enum class LineKind : uint8_t { Context, Removed, Added };

struct DiffLine {
  LineKind kind;
  std::string text;  // raw bytes, no trailing newline
};

struct Hunk {
  // 1-based coordinates as emitted in the @@ header. For old_count == 0 the
  // unified convention applies: old_start names the line *after which* the
  // insertion happens (0 = insert at top). Same for new_start/new_count == 0.
  long old_start = 0;
  long old_count = 0;
  long new_start = 0;
  long new_count = 0;
  std::vector<DiffLine> lines;
};

// 0-based index into the old-side line vector where the hunk begins.
inline size_t hunk_old_begin(const Hunk& h) {
  return static_cast<size_t>(h.old_count > 0 ? h.old_start - 1 : h.old_start);
}
inline size_t hunk_old_end(const Hunk& h) {
  return hunk_old_begin(h) + static_cast<size_t>(h.old_count);
}
inline size_t hunk_new_begin(const Hunk& h) {
  return static_cast<size_t>(h.new_count > 0 ? h.new_start - 1 : h.new_start);
}
inline size_t hunk_new_end(const Hunk& h) {
  return hunk_new_begin(h) + static_cast<size_t>(h.new_count);
}

enum class FileStatus : uint8_t { Added, Deleted, Modified, Renamed };

struct FileDiff {
  std::optional<std::string> old_path;  // absent for added files
  std::optional<std::string> new_path;  // absent for deleted files
  FileStatus status = FileStatus::Modified;
  std::vector<Hunk> hunks;
  bool is_binary = false;
  std::optional<uint32_t> old_mode;
  std::optional<uint32_t> new_mode;
  bool old_ends_without_newline = false;
  bool new_ends_without_newline = false;

  // Path of the file after this commit (old path for deletions).
  const std::string& path() const { return new_path ? *new_path : *old_path; }

  bool is_submodule() const {
    return (old_mode && *old_mode == 0160000) ||
           (new_mode && *new_mode == 0160000);
  }
  bool is_symlink() const {
    return (old_mode && *old_mode == 0120000) ||
           (new_mode && *new_mode == 0120000);
  }
  // True when the diff carries line content we can track.
  bool is_trackable() const {
    return !is_binary && !is_submodule() && !is_symlink();
  }
};

class DiffParseError : public std::runtime_error {
 public:
  DiffParseError(const std::string& msg, size_t byte_offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(byte_offset) +
                           ")"),
        offset_(byte_offset) {}
  size_t byte_offset() const { return offset_; }

 private:
  size_t offset_;
};

class LineTrackError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the output of `git diff` into per-file records. Hard error (with
// byte offset) on malformed headers or count mismatches; total over
// tool-produced output.
std::vector<FileDiff> parse_unified_diff(const std::string& raw);

// Rebuilds a per-line vector through one file diff.
//   added(hunk_index, line)        -> T   value for an inserted line
//   removed(hunk_index, old_value)        observer for a dropped line
//   check(hunk_index, old_value, line)    verifier for context/removed lines
// Throws LineTrackError when hunk coordinates do not fit old_lines (the
// "coordinate drift" signal).
template <typename T, typename AddedFn, typename RemovedFn, typename CheckFn>
std::vector<T> rebuild_through_diff(const std::vector<T>& old_lines,
                                    const FileDiff& diff, AddedFn&& added,
                                    RemovedFn&& removed, CheckFn&& check) {
  std::vector<T> out;
  size_t cursor = 0;
  for (size_t hi = 0; hi < diff.hunks.size(); ++hi) {
    const Hunk& h = diff.hunks[hi];
    size_t begin = hunk_old_begin(h);
    if (begin < cursor)
      throw LineTrackError("hunks overlap or are out of order");
    if (begin > old_lines.size())
      throw LineTrackError("hunk start beyond end of file");
    out.insert(out.end(), old_lines.begin() + cursor, old_lines.begin() + begin);
    cursor = begin;
    if (out.size() != hunk_new_begin(h))
      throw LineTrackError("new-side coordinates do not match rebuilt file");
    for (const DiffLine& line : h.lines) {
      switch (line.kind) {
        case LineKind::Context:
          if (cursor >= old_lines.size())
            throw LineTrackError("context line beyond end of file");
          check(hi, old_lines[cursor], line);
          out.push_back(old_lines[cursor]);
          ++cursor;
          break;
        case LineKind::Removed:
          if (cursor >= old_lines.size())
            throw LineTrackError("removed line beyond end of file");
          check(hi, old_lines[cursor], line);
          removed(hi, old_lines[cursor]);
          ++cursor;
          break;
        case LineKind::Added:
          out.push_back(added(hi, line));
          break;
      }
    }
    if (out.size() != hunk_new_end(h))
      throw LineTrackError("hunk new-side count does not match rebuilt file");
  }
  out.insert(out.end(), old_lines.begin() + cursor, old_lines.end());
  return out;
}

template <typename T, typename AddedFn>
std::vector<T> rebuild_through_diff(const std::vector<T>& old_lines,
                                    const FileDiff& diff, AddedFn&& added) {
  return rebuild_through_diff(
      old_lines, diff, std::forward<AddedFn>(added),
      [](size_t, const T&) {}, [](size_t, const T&, const DiffLine&) {});
}

// Applies one parsed file diff to the parent's lines, verifying context and
// removed lines byte-for-byte. Serves as the parser's round-trip oracle.
std::vector<std::string> apply_file_diff(
    const std::vector<std::string>& parent_lines, const FileDiff& diff);

// Calls fn(new_begin, new_end) with 1-based, half-open new-side coordinates
// of every maximal run of added lines in the hunk.
template <typename Fn>
void for_each_added_run(const Hunk& h, Fn&& fn) {
  long pos = h.new_count > 0 ? h.new_start : h.new_start + 1;
  long run_start = -1;
  for (const DiffLine& line : h.lines) {
    if (line.kind == LineKind::Added) {
      if (run_start < 0) run_start = pos;
      ++pos;
    } else {
      if (run_start >= 0) fn(run_start, pos);
      run_start = -1;
      if (line.kind == LineKind::Context) ++pos;
    }
  }
  if (run_start >= 0) fn(run_start, pos);
}

}  // namespace linespots
