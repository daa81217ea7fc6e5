#include "linespots/diff.hpp"

#include <cstdlib>
#include <string_view>

namespace linespots {

namespace {

// Forward-only line scanner over the raw diff buffer.
class LineScanner {
 public:
  explicit LineScanner(const std::string& raw) : raw_(raw) {}

  bool eof() const { return pos_ >= raw_.size(); }
  // Byte offset of the line peek()/next() would deliver.
  size_t line_offset() const { return pos_; }

  // Returns the next line without its trailing '\n'.
  std::string_view next() {
    size_t nl = raw_.find('\n', pos_);
    std::string_view line;
    if (nl == std::string::npos) {
      line = std::string_view(raw_).substr(pos_);
      pos_ = raw_.size();
    } else {
      line = std::string_view(raw_).substr(pos_, nl - pos_);
      pos_ = nl + 1;
    }
    return line;
  }

  std::string_view peek() const {
    size_t nl = raw_.find('\n', pos_);
    if (nl == std::string::npos) return std::string_view(raw_).substr(pos_);
    return std::string_view(raw_).substr(pos_, nl - pos_);
  }

 private:
  const std::string& raw_;
  size_t pos_ = 0;
};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Decodes git's C-style quoting: \" \\ \a \b \f \n \r \t \v and octal \NNN.
std::string unquote_c_style(std::string_view quoted, size_t offset) {
  if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"')
    throw DiffParseError("malformed quoted path", offset);
  std::string_view body = quoted.substr(1, quoted.size() - 2);
  std::string out;
  for (size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\') {
      out += c;
      continue;
    }
    if (i + 1 >= body.size())
      throw DiffParseError("truncated escape in quoted path", offset);
    char e = body[++i];
    switch (e) {
      case 'a': out += '\a'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 't': out += '\t'; break;
      case 'v': out += '\v'; break;
      case '\\': out += '\\'; break;
      case '"': out += '"'; break;
      default: {
        if (e < '0' || e > '7')
          throw DiffParseError("unknown escape in quoted path", offset);
        int val = 0;
        size_t j = i;
        while (j < body.size() && j < i + 3 && body[j] >= '0' && body[j] <= '7') {
          val = val * 8 + (body[j] - '0');
          ++j;
        }
        i = j - 1;
        out += static_cast<char>(val);
      }
    }
  }
  return out;
}

std::string maybe_unquote(std::string_view s, size_t offset) {
  if (!s.empty() && s.front() == '"') return unquote_c_style(s, offset);
  return std::string(s);
}

// Strips the a/ or b/ prefix from a ---/+++ path; returns nullopt for
// /dev/null.
std::optional<std::string> parse_marker_path(std::string_view rest,
                                             size_t offset) {
  // git terminates the path with a tab when it has trailing whitespace
  if (size_t tab = rest.find('\t'); tab != std::string_view::npos)
    rest = rest.substr(0, tab);
  if (rest == "/dev/null") return std::nullopt;
  std::string path = maybe_unquote(rest, offset);
  if (path.size() >= 2 && (path[0] == 'a' || path[0] == 'b') && path[1] == '/')
    return path.substr(2);
  throw DiffParseError("expected a/ or b/ prefixed path", offset);
}

// Splits the "diff --git a/X b/Y" remainder. Quoted forms are exact. The
// unquoted form is ambiguous for paths with spaces, so we look for a split
// where both sides name the same path; unequal paths always come with
// rename-from/to lines that override whatever we extract here, so this is
// best-effort and never throws on ambiguity.
void split_git_header_paths(std::string_view rest, size_t offset,
                            std::string& a_path, std::string& b_path) {
  if (!rest.empty() && rest.front() == '"') {
    size_t i = 1;
    while (i < rest.size() && rest[i] != '"') {
      if (rest[i] == '\\') ++i;
      ++i;
    }
    if (i >= rest.size())
      throw DiffParseError("unterminated quoted path", offset);
    a_path = unquote_c_style(rest.substr(0, i + 1), offset);
    std::string_view b_part = rest.substr(i + 1);
    if (starts_with(b_part, " ")) b_part.remove_prefix(1);
    b_path = maybe_unquote(b_part, offset);
  } else {
    // Prefer a split where the two sides agree after prefix stripping.
    for (size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] != ' ') continue;
      std::string_view a_cand = rest.substr(0, i);
      std::string_view b_cand = rest.substr(i + 1);
      if (starts_with(a_cand, "a/") && starts_with(b_cand, "b/") &&
          a_cand.substr(2) == b_cand.substr(2)) {
        a_path = std::string(a_cand);
        b_path = std::string(b_cand);
        break;
      }
    }
    if (a_path.empty() && b_path.empty()) {
      size_t sp = rest.find(' ');
      if (sp != std::string_view::npos) {
        a_path = std::string(rest.substr(0, sp));
        b_path = std::string(rest.substr(sp + 1));
      }
    }
  }
  if (starts_with(a_path, "a/")) a_path = a_path.substr(2);
  if (starts_with(b_path, "b/")) b_path = b_path.substr(2);
}

bool parse_long(std::string_view s, size_t& i, long& out) {
  if (i >= s.size() || s[i] < '0' || s[i] > '9') return false;
  long v = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
    v = v * 10 + (s[i] - '0');
    ++i;
  }
  out = v;
  return true;
}

// "@@ -os[,oc] +ns[,nc] @@ ..." -> coordinates
bool parse_hunk_header(std::string_view line, Hunk& h) {
  size_t i = 0;
  if (!starts_with(line, "@@ -")) return false;
  i = 4;
  if (!parse_long(line, i, h.old_start)) return false;
  h.old_count = 1;
  if (i < line.size() && line[i] == ',') {
    ++i;
    if (!parse_long(line, i, h.old_count)) return false;
  }
  if (i + 1 >= line.size() || line[i] != ' ' || line[i + 1] != '+')
    return false;
  i += 2;
  if (!parse_long(line, i, h.new_start)) return false;
  h.new_count = 1;
  if (i < line.size() && line[i] == ',') {
    ++i;
    if (!parse_long(line, i, h.new_count)) return false;
  }
  return starts_with(line.substr(i), " @@");
}

uint32_t parse_mode(std::string_view s) {
  return static_cast<uint32_t>(std::strtoul(std::string(s).c_str(), nullptr, 8));
}

bool is_file_boundary(std::string_view line) {
  return starts_with(line, "diff --git ");
}

void validate_file_diff(const FileDiff& fd, size_t offset) {
  size_t prev_old_end = 0, prev_new_end = 0;
  bool first = true;
  for (const Hunk& h : fd.hunks) {
    long old_seen = 0, new_seen = 0;
    for (const DiffLine& l : h.lines) {
      if (l.kind != LineKind::Added) ++old_seen;
      if (l.kind != LineKind::Removed) ++new_seen;
    }
    if (old_seen != h.old_count || new_seen != h.new_count)
      throw DiffParseError("hunk body does not match header counts", offset);
    if (!first && (hunk_old_begin(h) < prev_old_end ||
                   hunk_new_begin(h) < prev_new_end))
      throw DiffParseError("hunks overlap or are out of order", offset);
    prev_old_end = hunk_old_end(h);
    prev_new_end = hunk_new_end(h);
    first = false;
  }
  if (fd.status == FileStatus::Added) {
    for (const Hunk& h : fd.hunks)
      if (h.old_count != 0)
        throw DiffParseError("added file with non-empty old side", offset);
  }
  if (fd.status == FileStatus::Deleted) {
    for (const Hunk& h : fd.hunks)
      if (h.new_count != 0)
        throw DiffParseError("deleted file with non-empty new side", offset);
  }
}

}  // namespace

std::vector<FileDiff> parse_unified_diff(const std::string& raw) {
  std::vector<FileDiff> files;
  LineScanner scan(raw);

  while (!scan.eof()) {
    std::string_view line = scan.peek();
    if (!is_file_boundary(line))
      throw DiffParseError("expected 'diff --git' file header", scan.line_offset());
    size_t header_offset = scan.line_offset();
    scan.next();

    FileDiff fd;
    std::string a_path, b_path;
    split_git_header_paths(line.substr(11), header_offset, a_path, b_path);
    bool new_file = false, deleted_file = false;
    std::optional<std::string> rename_from, rename_to;

    // Extended headers up to ---/+++ or the next file.
    while (!scan.eof()) {
      std::string_view hl = scan.peek();
      size_t off = scan.line_offset();
      if (is_file_boundary(hl) || starts_with(hl, "@@ ")) break;
      scan.next();
      if (starts_with(hl, "old mode ")) {
        fd.old_mode = parse_mode(hl.substr(9));
      } else if (starts_with(hl, "new mode ")) {
        fd.new_mode = parse_mode(hl.substr(9));
      } else if (starts_with(hl, "new file mode ")) {
        new_file = true;
        fd.new_mode = parse_mode(hl.substr(14));
      } else if (starts_with(hl, "deleted file mode ")) {
        deleted_file = true;
        fd.old_mode = parse_mode(hl.substr(18));
      } else if (starts_with(hl, "rename from ")) {
        rename_from = maybe_unquote(hl.substr(12), off);
      } else if (starts_with(hl, "rename to ")) {
        rename_to = maybe_unquote(hl.substr(10), off);
      } else if (starts_with(hl, "copy from ") || starts_with(hl, "copy to ") ||
                 starts_with(hl, "similarity index ") ||
                 starts_with(hl, "dissimilarity index ")) {
        // carried for completeness; no structural effect
      } else if (starts_with(hl, "index ")) {
        // "index <old>..<new>[ <mode>]"
        if (size_t sp = hl.rfind(' '); sp != std::string_view::npos && sp >= 6) {
          std::string_view tail = hl.substr(sp + 1);
          if (!tail.empty() && tail.find('.') == std::string_view::npos &&
              tail[0] >= '0' && tail[0] <= '7') {
            uint32_t mode = parse_mode(tail);
            if (!fd.old_mode) fd.old_mode = mode;
            if (!fd.new_mode) fd.new_mode = mode;
          }
        }
      } else if (starts_with(hl, "Binary files ") ||
                 starts_with(hl, "GIT binary patch")) {
        fd.is_binary = true;
      } else if (starts_with(hl, "--- ")) {
        std::optional<std::string> p = parse_marker_path(hl.substr(4), off);
        if (!p) new_file = true;
        else a_path = *p;
      } else if (starts_with(hl, "+++ ")) {
        std::optional<std::string> p = parse_marker_path(hl.substr(4), off);
        if (!p) deleted_file = true;
        else b_path = *p;
      } else if (fd.is_binary) {
        // body lines of a binary patch (literal/delta blobs); skip
      } else if (hl.empty()) {
        // tolerate a stray blank line between files
      } else {
        throw DiffParseError("unrecognized diff header line", off);
      }
    }

    if (rename_from) a_path = *rename_from;
    if (rename_to) b_path = *rename_to;

    if (new_file) {
      fd.status = FileStatus::Added;
      fd.new_path = b_path;
    } else if (deleted_file) {
      fd.status = FileStatus::Deleted;
      fd.old_path = a_path;
    } else if (rename_from || rename_to) {
      fd.status = FileStatus::Renamed;
      fd.old_path = a_path;
      fd.new_path = b_path;
    } else {
      fd.status = FileStatus::Modified;
      fd.old_path = a_path;
      fd.new_path = b_path;
    }
    if ((fd.old_path && fd.old_path->empty()) ||
        (fd.new_path && fd.new_path->empty()))
      throw DiffParseError("could not determine file path", header_offset);

    // Hunks.
    while (!scan.eof() && starts_with(scan.peek(), "@@ ")) {
      size_t hunk_offset = scan.line_offset();
      std::string_view header = scan.next();
      Hunk h;
      if (!parse_hunk_header(header, h))
        throw DiffParseError("malformed hunk header", hunk_offset);
      long old_seen = 0, new_seen = 0;
      while (old_seen < h.old_count || new_seen < h.new_count) {
        if (scan.eof())
          throw DiffParseError("diff truncated inside hunk", scan.line_offset());
        size_t off = scan.line_offset();
        std::string_view body = scan.next();
        if (body.empty())
          throw DiffParseError("blank line inside hunk", off);
        char tag = body.front();
        std::string_view text = body.substr(1);
        switch (tag) {
          case ' ':
            h.lines.push_back({LineKind::Context, std::string(text)});
            ++old_seen;
            ++new_seen;
            break;
          case '-':
            h.lines.push_back({LineKind::Removed, std::string(text)});
            ++old_seen;
            break;
          case '+':
            h.lines.push_back({LineKind::Added, std::string(text)});
            ++new_seen;
            break;
          case '\\':
            if (h.lines.empty())
              throw DiffParseError("no-newline marker before any line", off);
            switch (h.lines.back().kind) {
              case LineKind::Removed: fd.old_ends_without_newline = true; break;
              case LineKind::Added: fd.new_ends_without_newline = true; break;
              case LineKind::Context:
                fd.old_ends_without_newline = true;
                fd.new_ends_without_newline = true;
                break;
            }
            break;
          default:
            throw DiffParseError("unexpected line inside hunk", off);
        }
      }
      // A no-newline marker may trail the hunk's final line.
      if (!scan.eof() && starts_with(scan.peek(), "\\")) {
        scan.next();
        if (!h.lines.empty()) {
          switch (h.lines.back().kind) {
            case LineKind::Removed: fd.old_ends_without_newline = true; break;
            case LineKind::Added: fd.new_ends_without_newline = true; break;
            case LineKind::Context:
              fd.old_ends_without_newline = true;
              fd.new_ends_without_newline = true;
              break;
          }
        }
      }
      fd.hunks.push_back(std::move(h));
    }

    validate_file_diff(fd, header_offset);
    files.push_back(std::move(fd));
  }
  return files;
}

std::vector<std::string> apply_file_diff(
    const std::vector<std::string>& parent_lines, const FileDiff& diff) {
  return rebuild_through_diff(
      parent_lines, diff,
      [](size_t, const DiffLine& line) { return line.text; },
      [](size_t, const std::string&) {},
      [](size_t, const std::string& have, const DiffLine& want) {
        if (have != want.text)
          throw LineTrackError("line content mismatch: expected \"" +
                               want.text + "\", file has \"" + have + "\"");
      });
}

}  // namespace linespots
