// fixture_repo.hpp — scripted throwaway git repositories for tests.
#pragma once

#include <string>
#include <vector>

namespace linespots::testing {

// A git repository under a fresh temp directory, removed on destruction.
// Commits are made with a pinned identity and monotonically increasing
// timestamps so histories are stable.
class FixtureRepo {
 public:
  FixtureRepo();
  ~FixtureRepo();
  FixtureRepo(const FixtureRepo&) = delete;
  FixtureRepo& operator=(const FixtureRepo&) = delete;

  const std::string& path() const { return dir_; }

  void write(const std::string& file, const std::string& content);
  void write_lines(const std::string& file,
                   const std::vector<std::string>& lines);
  void remove(const std::string& file);
  void move(const std::string& from, const std::string& to);

  // Stages everything and commits; returns the new commit id.
  std::string commit(const std::string& message);
  std::string commit_empty(const std::string& message);

  std::string head() const;
  std::string rev(const std::string& ref) const;

  void branch(const std::string& name);
  void checkout(const std::string& name);
  std::string merge(const std::string& branch, const std::string& message);

  std::string git(const std::vector<std::string>& args,
                  const std::string& input = {}) const;

 private:
  std::string dir_;
  int clock_ = 0;
};

// Builds a `git fast-import` stream: thousands of commits in one process.
class FastImportBuilder {
 public:
  void begin_commit(const std::string& message);
  void put_file(const std::string& path, const std::string& content,
                const std::string& mode = "100644");
  void put_gitlink(const std::string& path, const std::string& commit_sha);
  void delete_file(const std::string& path);
  void rename_file(const std::string& from, const std::string& to);

  // Initializes a repository at `dir` and imports the stream; returns HEAD.
  std::string import_into(const std::string& dir);

  const std::string& stream() const { return stream_; }

 private:
  std::string stream_;
  int commits_ = 0;
};

// Unique temp directory for test artifacts (not removed automatically).
std::string make_temp_dir(const std::string& hint);
void remove_tree(const std::string& dir);

}  // namespace linespots::testing
