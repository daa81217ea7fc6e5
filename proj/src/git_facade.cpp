#include "linespots/git_facade.hpp"

#include <algorithm>
#include <cstring>

#include "linespots/process.hpp"

namespace linespots {

const char kEmptyTreeId[] = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";

namespace {

std::vector<std::string> git_argv(const std::string& repo_path,
                                  std::initializer_list<std::string> args) {
  std::vector<std::string> argv{"git", "-C", repo_path,
                                "-c", "core.quotepath=false"};
  argv.insert(argv.end(), args);
  return argv;
}

std::string git_checked(const std::string& repo_path,
                        std::initializer_list<std::string> args,
                        const std::string& input = {}) {
  ProcessResult r = run_process(git_argv(repo_path, args), input);
  if (!r.ok())
    throw GitError("git failed (exit " + std::to_string(r.exit_code) +
                   ") in " + repo_path + ": " + r.err);
  return std::move(r.out);
}

std::vector<std::string> split_fields(const std::string& record, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = record.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(record.substr(start));
      break;
    }
    fields.push_back(record.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// splitmix64; used instead of std::shuffle so sampling is reproducible
// across standard library implementations.
uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <typename T>
void deterministic_shuffle(std::vector<T>& v, uint64_t seed) {
  uint64_t state = seed;
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(splitmix64(state) % i);
    std::swap(v[i - 1], v[j]);
  }
}

bool content_is_binary(const std::string& content) {
  size_t probe = std::min<size_t>(content.size(), 8000);
  return memchr(content.data(), '\0', probe) != nullptr;
}

int64_t count_lines(const std::string& content) {
  int64_t n = static_cast<int64_t>(std::count(content.begin(), content.end(), '\n'));
  if (!content.empty() && content.back() != '\n') ++n;
  return n;
}

struct TreeEntry {
  std::string sha;
  std::string path;
};

// Regular-file blobs of a tree; symlinks and gitlinks filtered out.
std::vector<TreeEntry> list_tree_blobs(const std::string& repo_path,
                                       const std::string& treeish) {
  std::string out = git_checked(repo_path, {"ls-tree", "-r", "-z", treeish});
  std::vector<TreeEntry> entries;
  size_t pos = 0;
  while (pos < out.size()) {
    size_t end = out.find('\0', pos);
    if (end == std::string::npos) end = out.size();
    std::string record = out.substr(pos, end - pos);
    pos = end + 1;
    // "<mode> <type> <sha>\t<path>"
    size_t tab = record.find('\t');
    if (tab == std::string::npos) continue;
    std::vector<std::string> meta = split_fields(record.substr(0, tab), ' ');
    if (meta.size() != 3 || meta[1] != "blob") continue;
    if (meta[0] == "120000") continue;  // symlink
    entries.push_back({meta[2], record.substr(tab + 1)});
  }
  return entries;
}

// Streams all requested blobs through one `git cat-file --batch` call and
// hands each (entry, content) to fn.
template <typename Fn>
void for_each_blob(const std::string& repo_path,
                   const std::vector<TreeEntry>& entries, Fn&& fn) {
  if (entries.empty()) return;
  std::string request;
  for (const TreeEntry& e : entries) {
    request += e.sha;
    request += '\n';
  }
  std::string out = git_checked(repo_path, {"cat-file", "--batch"}, request);
  size_t pos = 0;
  for (const TreeEntry& e : entries) {
    size_t nl = out.find('\n', pos);
    if (nl == std::string::npos)
      throw GitError("cat-file --batch output truncated");
    std::string header = out.substr(pos, nl - pos);
    std::vector<std::string> parts = split_fields(header, ' ');
    if (parts.size() != 3 || parts[1] != "blob")
      throw GitError("unexpected cat-file record for " + e.sha + ": " + header);
    size_t size = std::stoull(parts[2]);
    pos = nl + 1;
    if (pos + size > out.size())
      throw GitError("cat-file --batch output truncated");
    fn(e, std::string_view(out).substr(pos, size));
    pos += size + 1;  // trailing newline after content
  }
}

std::string resolve_commit(const std::string& repo_path,
                           const std::string& rev) {
  std::string out =
      git_checked(repo_path, {"rev-parse", "--verify", rev + "^{commit}"});
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r'))
    out.pop_back();
  return out;
}

std::vector<CommitRecord> to_records(const std::vector<ChainCommit>& chain,
                                     size_t begin, size_t end) {
  std::vector<CommitRecord> records;
  records.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    CommitRecord r;
    r.commit_id = chain[i].id;
    r.first_parent = chain[i].first_parent;
    r.index = static_cast<int>(i - begin);
    r.message = chain[i].message;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace

FixClassifier::FixClassifier(const std::string& pattern) : pattern_(pattern) {
  try {
    regex_ = std::regex(pattern, std::regex::ECMAScript | std::regex::icase |
                                     std::regex::multiline);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid fix pattern \"" + pattern + "\": " + e.what());
  }
}

bool FixClassifier::matches(const std::string& message) const {
  return std::regex_search(message, regex_);
}

std::vector<ChainCommit> load_first_parent_chain(const std::string& repo_path,
                                                 const std::string& tip,
                                                 long max_count) {
  std::vector<std::string> argv = git_argv(
      repo_path, {"log", "--first-parent", "-z", "--format=%H%x01%P%x01%B"});
  if (max_count >= 0) argv.push_back("-n" + std::to_string(max_count));
  argv.push_back(tip);
  ProcessResult r = run_process(argv);
  if (!r.ok())
    throw GitError("cannot read history of " + tip + " in " + repo_path +
                   ": " + r.err);

  std::vector<ChainCommit> chain;
  size_t pos = 0;
  while (pos < r.out.size()) {
    size_t end = r.out.find('\0', pos);
    if (end == std::string::npos) end = r.out.size();
    std::string record = r.out.substr(pos, end - pos);
    pos = end + 1;
    if (record.empty()) continue;
    size_t f1 = record.find('\x01');
    size_t f2 = record.find('\x01', f1 + 1);
    if (f1 == std::string::npos || f2 == std::string::npos)
      throw GitError("malformed log record");
    ChainCommit c;
    c.id = record.substr(0, f1);
    std::string parents = record.substr(f1 + 1, f2 - f1 - 1);
    if (!parents.empty()) {
      size_t sp = parents.find(' ');
      c.first_parent = parents.substr(0, sp);
    }
    c.message = record.substr(f2 + 1);
    chain.push_back(std::move(c));
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

void classify_commits(std::vector<CommitRecord>& commits,
                      const FixClassifier& fix) {
  for (CommitRecord& c : commits) c.is_fix = fix.matches(c.message);
}

AnalysisWindow linearize_history(const std::string& repo_path,
                                 const std::string& origin, int depth,
                                 const FixClassifier* fix) {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  std::string resolved = resolve_commit(repo_path, origin);
  std::vector<ChainCommit> chain =
      load_first_parent_chain(repo_path, resolved, depth);
  AnalysisWindow window;
  window.origin = resolved;
  window.depth = depth;
  window.commits = to_records(chain, 0, chain.size());
  if (fix) classify_commits(window.commits, *fix);
  return window;
}

std::string extract_diff_text(const std::string& repo_path,
                              const std::string& commit_id,
                              const std::optional<std::string>& first_parent) {
  std::string base = first_parent ? *first_parent : std::string(kEmptyTreeId);
  return git_checked(
      repo_path,
      {"-c", "diff.noprefix=false", "-c", "diff.mnemonicPrefix=false", "diff",
       "--no-color", "--no-ext-diff", "--no-textconv",
       "--diff-algorithm=histogram", "--find-renames", "-U3", base,
       commit_id});
}

std::string extract_diff_text(const std::string& repo_path,
                              const std::string& commit_id) {
  std::string resolved = resolve_commit(repo_path, commit_id);
  ProcessResult parent = run_process(
      git_argv(repo_path, {"rev-parse", "--verify", "--quiet", resolved + "^1"}));
  std::optional<std::string> first_parent;
  if (parent.ok()) {
    std::string id = parent.out;
    while (!id.empty() && (id.back() == '\n' || id.back() == '\r'))
      id.pop_back();
    first_parent = id;
  }
  return extract_diff_text(repo_path, resolved, first_parent);
}

std::vector<OriginSample> sample_origins(const std::string& repo_path,
                                         int count, int depth,
                                         int future_length, uint64_t seed) {
  if (count < 0 || count > 3)
    throw std::invalid_argument("sample count must be between 0 and 3");
  if (depth < 1 || future_length < 1)
    throw std::invalid_argument("depth and future_length must be >= 1");
  if (count == 0) return {};

  std::vector<ChainCommit> chain = load_first_parent_chain(repo_path, "HEAD");
  long total = static_cast<long>(chain.size());
  if (total < depth + future_length)
    throw GitError("repository history too short: " + std::to_string(total) +
                   " first-parent commits, need at least " +
                   std::to_string(depth + future_length));

  // Valid origin positions give a full-depth window and full-length future.
  std::vector<long> candidates;
  for (long p = depth - 1; p + future_length <= total - 1; ++p)
    candidates.push_back(p);
  deterministic_shuffle(candidates, seed);

  struct Extent {
    long begin, end;  // inclusive window start .. inclusive future end
  };
  std::vector<Extent> taken;
  std::vector<long> chosen;
  for (long p : candidates) {
    if (static_cast<int>(chosen.size()) == count) break;
    Extent e{p - depth + 1, p + future_length};
    bool overlaps = false;
    for (const Extent& t : taken)
      if (e.begin <= t.end && t.begin <= e.end) {
        overlaps = true;
        break;
      }
    if (overlaps) continue;
    taken.push_back(e);
    chosen.push_back(p);
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<OriginSample> samples;
  for (long p : chosen) {
    OriginSample s;
    s.origin = chain[p].id;
    s.window.origin = chain[p].id;
    s.window.depth = depth;
    s.window.commits = to_records(chain, p - depth + 1, p + 1);
    s.future_window = to_records(chain, p + 1, p + 1 + future_length);
    samples.push_back(std::move(s));
  }
  return samples;
}

TreeSnapshot snapshot_line_counts(const std::string& repo_path,
                                  const std::string& treeish) {
  TreeSnapshot snap;
  std::vector<TreeEntry> entries = list_tree_blobs(repo_path, treeish);
  for_each_blob(repo_path, entries,
                [&](const TreeEntry& e, std::string_view content) {
                  std::string c(content);
                  if (content_is_binary(c)) return;
                  snap.line_counts[e.path] = count_lines(c);
                });
  return snap;
}

std::map<std::string, std::vector<std::string>> snapshot_file_lines(
    const std::string& repo_path, const std::string& treeish) {
  std::map<std::string, std::vector<std::string>> files;
  std::vector<TreeEntry> entries = list_tree_blobs(repo_path, treeish);
  for_each_blob(repo_path, entries,
                [&](const TreeEntry& e, std::string_view content) {
                  std::string c(content);
                  if (content_is_binary(c)) return;
                  std::vector<std::string> lines;
                  size_t start = 0;
                  while (start < c.size()) {
                    size_t nl = c.find('\n', start);
                    if (nl == std::string::npos) {
                      lines.push_back(c.substr(start));
                      break;
                    }
                    lines.push_back(c.substr(start, nl - start));
                    start = nl + 1;
                  }
                  files[e.path] = std::move(lines);
                });
  return files;
}

}  // namespace linespots
