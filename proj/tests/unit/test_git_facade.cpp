#include "linespots/git_facade.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

#include "linespots/diff.hpp"
#include "support/fixture_repo.hpp"

using namespace linespots;
using linespots::testing::FixtureRepo;

TEST_CASE("linearize_history walks a linear chain oldest first") {
  FixtureRepo repo;
  repo.write("f.txt", "one\n");
  std::string a = repo.commit("first");
  repo.write("f.txt", "one\ntwo\n");
  std::string b = repo.commit("second");
  repo.write("f.txt", "one\ntwo\nthree\n");
  std::string c = repo.commit("third");

  AnalysisWindow w = linearize_history(repo.path(), c, 500);
  REQUIRE(w.commits.size() == 3);
  CHECK(w.origin == c);
  CHECK(w.commits[0].commit_id == a);
  CHECK(w.commits[1].commit_id == b);
  CHECK(w.commits[2].commit_id == c);
  CHECK(w.commits[0].index == 0);
  CHECK(w.commits[2].index == 2);
  CHECK(w.commits.back().commit_id == w.origin);

  SUBCASE("depth truncates to the newest commits") {
    AnalysisWindow short_w = linearize_history(repo.path(), c, 2);
    REQUIRE(short_w.commits.size() == 2);
    CHECK(short_w.commits[0].commit_id == b);
    CHECK(short_w.commits[0].index == 0);
    CHECK(short_w.commits[1].commit_id == c);
  }

  SUBCASE("a root origin yields a window of one") {
    AnalysisWindow root_w = linearize_history(repo.path(), a, 500);
    REQUIRE(root_w.commits.size() == 1);
    CHECK(root_w.commits[0].commit_id == a);
  }

  SUBCASE("unknown origin raises GitError") {
    CHECK_THROWS_AS(linearize_history(repo.path(), "deadbeef", 5), GitError);
  }
}

TEST_CASE("linearize_history follows the first parent across merges") {
  FixtureRepo repo;
  repo.write("f.txt", "base\n");
  std::string base = repo.commit("base");
  repo.branch("side");
  repo.write("g.txt", "side change\n");
  std::string side = repo.commit("side work");
  repo.checkout("master");
  repo.write("f.txt", "base\nmainline\n");
  std::string main2 = repo.commit("mainline work");
  std::string merge = repo.merge("side", "merge side");

  AnalysisWindow w = linearize_history(repo.path(), merge, 500);
  std::vector<std::string> ids;
  for (const CommitRecord& c : w.commits) ids.push_back(c.commit_id);
  CHECK(ids == std::vector<std::string>{base, main2, merge});
  CHECK(w.commits.back().first_parent == main2);
}

TEST_CASE("classify_fix matches per line, case-insensitively") {
  FixClassifier angular("^fix(\\((.*)\\))?:");
  CHECK(classify_fix("fix(core): resolve crash", angular));
  CHECK(classify_fix("Fix: simple", angular));
  CHECK(classify_fix("feat: thing\n\nfix(parser): follow-up line", angular));
  CHECK_FALSE(classify_fix("prefix: not a fix", angular));

  FixClassifier words("fix|fixes|fixed");
  CHECK_FALSE(classify_fix("Add feature X", words));

  // substring semantics: the known false-positive mode of plain patterns
  FixClassifier plain("fix");
  CHECK(classify_fix("Prefixed all names", plain));

  CHECK_THROWS_AS(FixClassifier("fix("), ConfigError);
}

TEST_CASE("extract_diff_text matches git byte for byte") {
  FixtureRepo repo;
  repo.write("f.txt", "one\ntwo\nthree\n");
  std::string a = repo.commit("seed");
  repo.write("f.txt", "one\ntwo\nthree\nfour\n");
  std::string b = repo.commit("extend");
  std::string empty = repo.commit_empty("nothing changed");

  SUBCASE("empty commit produces an empty diff") {
    CHECK(extract_diff_text(repo.path(), empty).empty());
  }

  SUBCASE("one added line produces the expected hunk range") {
    std::string diff = extract_diff_text(repo.path(), b);
    CHECK(diff.find("@@ -1,3 +1,4 @@") != std::string::npos);
    std::string expected = repo.git(
        {"diff", "--no-color", "--no-ext-diff", "--no-textconv",
         "--diff-algorithm=histogram", "--find-renames", "-U3", a, b});
    CHECK(diff == expected);
  }

  SUBCASE("a root commit diffs against the empty tree") {
    std::string diff = extract_diff_text(repo.path(), a);
    CHECK(diff.find("@@ -0,0 +1,3 @@") != std::string::npos);
    CHECK(diff.find("new file mode") != std::string::npos);
  }
}

TEST_CASE("diff round-trips against checkouts") {
  FixtureRepo repo;
  repo.write("a.txt", "alpha\nbeta\ngamma\n");
  repo.write("b.txt", "one\ntwo\n");
  repo.commit("seed");
  repo.write("a.txt", "alpha\nbeta2\ngamma\ndelta\n");
  repo.commit("edit a");
  repo.move("b.txt", "c.txt");
  repo.write("c.txt", "one\ntwo\nthree\n");
  repo.commit("rename b");
  repo.write("a.txt", "alpha\nbeta2\n");
  repo.remove("c.txt");
  repo.commit("shrink");

  std::vector<ChainCommit> chain = load_first_parent_chain(repo.path(), "HEAD");
  for (size_t i = 1; i < chain.size(); ++i) {
    auto parent_files = snapshot_file_lines(repo.path(), chain[i - 1].id);
    auto child_files = snapshot_file_lines(repo.path(), chain[i].id);
    std::string raw =
        extract_diff_text(repo.path(), chain[i].id, chain[i].first_parent);
    for (const FileDiff& fd : parse_unified_diff(raw)) {
      if (!fd.is_trackable()) continue;
      std::vector<std::string> parent_lines;
      if (fd.old_path) {
        auto it = parent_files.find(*fd.old_path);
        REQUIRE(it != parent_files.end());
        parent_lines = it->second;
      }
      std::vector<std::string> rebuilt = apply_file_diff(parent_lines, fd);
      if (fd.status == FileStatus::Deleted) {
        CHECK(rebuilt.empty());
        CHECK(child_files.find(*fd.old_path) == child_files.end());
      } else {
        auto it = child_files.find(fd.path());
        REQUIRE(it != child_files.end());
        CHECK(rebuilt == it->second);
      }
    }
  }
}

TEST_CASE("snapshot_line_counts counts lines the way diffs do") {
  FixtureRepo repo;
  repo.write("plain.txt", "a\nb\n");
  repo.write("tailless.txt", "a\nb");  // no trailing newline: still 2 lines
  repo.write("empty.txt", "");
  repo.write("blob.bin", std::string("x\0y", 3));
  repo.commit("seed");

  TreeSnapshot snap = snapshot_line_counts(repo.path(), repo.head());
  CHECK(snap.line_counts.at("plain.txt") == 2);
  CHECK(snap.line_counts.at("tailless.txt") == 2);
  CHECK(snap.line_counts.at("empty.txt") == 0);
  CHECK(snap.line_counts.count("blob.bin") == 0);  // binary excluded
  CHECK(snap.total_lines() == 4);
}

TEST_CASE("sample_origins is deterministic and non-overlapping") {
  FixtureRepo repo;
  for (int i = 0; i < 14; ++i) {
    repo.write("f.txt", "line " + std::to_string(i) + "\n");
    repo.commit("commit " + std::to_string(i));
  }
  std::vector<ChainCommit> chain = load_first_parent_chain(repo.path(), "HEAD");
  REQUIRE(chain.size() == 14);

  SUBCASE("exactly one placement when history equals depth+future") {
    // depth 7 + future 7 = 14: only position 6 qualifies
    std::vector<OriginSample> samples =
        sample_origins(repo.path(), 3, 7, 7, 42);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].origin == chain[6].id);
    CHECK(samples[0].window.commits.size() == 7);
    CHECK(samples[0].future_window.size() == 7);
  }

  SUBCASE("count zero yields nothing") {
    CHECK(sample_origins(repo.path(), 0, 3, 3, 1).empty());
  }

  SUBCASE("too short a history is an error") {
    CHECK_THROWS_AS(sample_origins(repo.path(), 1, 10, 10, 1), GitError);
  }

  SUBCASE("fixed seed reproduces identical samples; windows never overlap") {
    for (uint64_t seed : {7ull, 99ull, 12345ull}) {
      std::vector<OriginSample> first =
          sample_origins(repo.path(), 3, 3, 3, seed);
      std::vector<OriginSample> second =
          sample_origins(repo.path(), 3, 3, 3, seed);
      REQUIRE(first.size() == second.size());
      std::set<std::string> seen;
      for (size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].origin == second[i].origin);
        for (const CommitRecord& c : first[i].window.commits)
          CHECK(seen.insert(c.commit_id).second);
        for (const CommitRecord& c : first[i].future_window)
          CHECK(seen.insert(c.commit_id).second);
      }
    }
  }
}

TEST_CASE("window and future slices cover disjoint consecutive commits") {
  FixtureRepo repo;
  std::vector<std::string> ids;
  for (int i = 0; i < 9; ++i) {
    repo.write("f.txt", std::to_string(i) + "\n");
    ids.push_back(repo.commit("c" + std::to_string(i)));
  }
  std::vector<OriginSample> samples = sample_origins(repo.path(), 1, 4, 3, 5);
  REQUIRE(samples.size() == 1);
  const OriginSample& s = samples[0];
  CHECK(s.window.commits.back().commit_id == s.origin);
  CHECK(s.window.commits.size() == 4);
  CHECK(s.future_window.size() == 3);
  // future strictly follows the origin on the chain
  auto pos = std::find(ids.begin(), ids.end(), s.origin) - ids.begin();
  CHECK(s.future_window[0].commit_id == ids[pos + 1]);
}
