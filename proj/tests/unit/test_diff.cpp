#include "linespots/diff.hpp"

#include <doctest.h>

using namespace linespots;

namespace {

const char kSimpleDiff[] =
    "diff --git a/src/main.cc b/src/main.cc\n"
    "index 0000001..0000002 100644\n"
    "--- a/src/main.cc\n"
    "+++ b/src/main.cc\n"
    "@@ -1,3 +1,4 @@\n"
    " alpha\n"
    " beta\n"
    "+inserted\n"
    " gamma\n";

}  // namespace

TEST_CASE("empty input parses to no files") {
  CHECK(parse_unified_diff("").empty());
}

TEST_CASE("single hunk with one added line") {
  std::vector<FileDiff> files = parse_unified_diff(kSimpleDiff);
  REQUIRE(files.size() == 1);
  const FileDiff& fd = files[0];
  CHECK(fd.status == FileStatus::Modified);
  CHECK(*fd.old_path == "src/main.cc");
  CHECK(*fd.new_path == "src/main.cc");
  REQUIRE(fd.hunks.size() == 1);
  const Hunk& h = fd.hunks[0];
  CHECK(h.old_start == 1);
  CHECK(h.old_count == 3);
  CHECK(h.new_start == 1);
  CHECK(h.new_count == 4);
  REQUIRE(h.lines.size() == 4);
  CHECK(h.lines[2].kind == LineKind::Added);
  CHECK(h.lines[2].text == "inserted");

  std::vector<std::string> parent = {"alpha", "beta", "gamma"};
  std::vector<std::string> child = apply_file_diff(parent, fd);
  CHECK(child == std::vector<std::string>{"alpha", "beta", "inserted", "gamma"});
}

TEST_CASE("added and deleted files map /dev/null headers") {
  const char raw[] =
      "diff --git a/new.txt b/new.txt\n"
      "new file mode 100644\n"
      "index 0000000..1111111\n"
      "--- /dev/null\n"
      "+++ b/new.txt\n"
      "@@ -0,0 +1,2 @@\n"
      "+x\n"
      "+y\n"
      "diff --git a/old.txt b/old.txt\n"
      "deleted file mode 100644\n"
      "index 2222222..0000000\n"
      "--- a/old.txt\n"
      "+++ /dev/null\n"
      "@@ -1,1 +0,0 @@\n"
      "-gone\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  REQUIRE(files.size() == 2);
  CHECK(files[0].status == FileStatus::Added);
  CHECK(!files[0].old_path.has_value());
  CHECK(*files[0].new_path == "new.txt");
  CHECK(files[0].hunks[0].old_count == 0);
  CHECK(files[1].status == FileStatus::Deleted);
  CHECK(!files[1].new_path.has_value());
  CHECK(*files[1].old_path == "old.txt");
  CHECK(files[1].hunks[0].new_count == 0);

  CHECK(apply_file_diff({}, files[0]) == std::vector<std::string>{"x", "y"});
  CHECK(apply_file_diff({"gone"}, files[1]).empty());
}

TEST_CASE("rename-only diff has no hunks") {
  const char raw[] =
      "diff --git a/before.txt b/after.txt\n"
      "similarity index 100%\n"
      "rename from before.txt\n"
      "rename to after.txt\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  REQUIRE(files.size() == 1);
  CHECK(files[0].status == FileStatus::Renamed);
  CHECK(*files[0].old_path == "before.txt");
  CHECK(*files[0].new_path == "after.txt");
  CHECK(files[0].hunks.empty());
}

TEST_CASE("malformed hunk header is a hard error with byte offset") {
  const char raw[] =
      "diff --git a/f b/f\n"
      "--- a/f\n"
      "+++ b/f\n"
      "@@ -x,3 +1,3 @@\n";
  CHECK_THROWS_AS(parse_unified_diff(raw), DiffParseError);
  try {
    parse_unified_diff(raw);
  } catch (const DiffParseError& e) {
    CHECK(e.byte_offset() == 35);  // start of the bad header line
  }
}

TEST_CASE("count mismatch between header and body is a hard error") {
  const char raw[] =
      "diff --git a/f b/f\n"
      "--- a/f\n"
      "+++ b/f\n"
      "@@ -1,2 +1,2 @@\n"
      " only one line\n";
  CHECK_THROWS_AS(parse_unified_diff(raw), DiffParseError);
}

TEST_CASE("no-newline markers are consumed without creating lines") {
  const char raw[] =
      "diff --git a/f b/f\n"
      "--- a/f\n"
      "+++ b/f\n"
      "@@ -1,1 +1,1 @@\n"
      "-old tail\n"
      "\\ No newline at end of file\n"
      "+new tail\n"
      "\\ No newline at end of file\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  REQUIRE(files.size() == 1);
  REQUIRE(files[0].hunks.size() == 1);
  CHECK(files[0].hunks[0].lines.size() == 2);
  CHECK(files[0].old_ends_without_newline);
  CHECK(files[0].new_ends_without_newline);
  CHECK(apply_file_diff({"old tail"}, files[0]) ==
        std::vector<std::string>{"new tail"});
}

TEST_CASE("pure insertion hunk uses the line-after convention") {
  const char raw[] =
      "diff --git a/f b/f\n"
      "--- a/f\n"
      "+++ b/f\n"
      "@@ -2,0 +3,2 @@\n"
      "+p\n"
      "+q\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  std::vector<std::string> parent = {"a", "b", "c"};
  CHECK(apply_file_diff(parent, files[0]) ==
        std::vector<std::string>{"a", "b", "p", "q", "c"});
}

TEST_CASE("apply on an empty diff is the identity") {
  std::vector<std::string> parent = {"a", "b"};
  FileDiff noop;
  noop.old_path = "f";
  noop.new_path = "f";
  CHECK(apply_file_diff(parent, noop) == parent);
}

TEST_CASE("context mismatch against parent lines signals drift") {
  std::vector<FileDiff> files = parse_unified_diff(kSimpleDiff);
  std::vector<std::string> wrong_parent = {"alpha", "BETA", "gamma"};
  CHECK_THROWS_AS(apply_file_diff(wrong_parent, files[0]), LineTrackError);
}

TEST_CASE("quoted paths are unquoted") {
  const char raw[] =
      "diff --git \"a/sp ace\\\"q.txt\" \"b/sp ace\\\"q.txt\"\n"
      "--- \"a/sp ace\\\"q.txt\"\n"
      "+++ \"b/sp ace\\\"q.txt\"\n"
      "@@ -1,1 +1,1 @@\n"
      "-u\n"
      "+v\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  REQUIRE(files.size() == 1);
  CHECK(*files[0].new_path == "sp ace\"q.txt");
}

TEST_CASE("unquoted paths with spaces split on the symmetric point") {
  const char raw[] =
      "diff --git a/has space.txt b/has space.txt\n"
      "old mode 100644\n"
      "new mode 100755\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  REQUIRE(files.size() == 1);
  CHECK(*files[0].new_path == "has space.txt");
  CHECK(files[0].hunks.empty());
  CHECK(*files[0].old_mode == 0100644u);
  CHECK(*files[0].new_mode == 0100755u);
}

TEST_CASE("binary file entries carry no hunks") {
  const char raw[] =
      "diff --git a/blob.bin b/blob.bin\n"
      "index 1111111..2222222 100644\n"
      "Binary files a/blob.bin and b/blob.bin differ\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  REQUIRE(files.size() == 1);
  CHECK(files[0].is_binary);
  CHECK(!files[0].is_trackable());
  CHECK(files[0].hunks.empty());
}

TEST_CASE("submodule pointer changes are flagged by mode") {
  const char raw[] =
      "diff --git a/vendor/dep b/vendor/dep\n"
      "index 1111111..2222222 160000\n"
      "--- a/vendor/dep\n"
      "+++ b/vendor/dep\n"
      "@@ -1 +1 @@\n"
      "-Subproject commit 1111111111111111111111111111111111111111\n"
      "+Subproject commit 2222222222222222222222222222222222222222\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  REQUIRE(files.size() == 1);
  CHECK(files[0].is_submodule());
  CHECK(!files[0].is_trackable());
}

TEST_CASE("for_each_added_run reports new-side coordinates") {
  const char raw[] =
      "diff --git a/f b/f\n"
      "--- a/f\n"
      "+++ b/f\n"
      "@@ -1,4 +1,7 @@\n"
      " k1\n"
      "+n1\n"
      "+n2\n"
      " k2\n"
      " k3\n"
      "+n3\n"
      " k4\n";
  std::vector<FileDiff> files = parse_unified_diff(raw);
  const Hunk& h = files[0].hunks[0];
  std::vector<std::pair<long, long>> runs;
  for_each_added_run(h, [&](long b, long e) { runs.emplace_back(b, e); });
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == std::pair<long, long>{2, 4});
  CHECK(runs[1] == std::pair<long, long>{6, 7});
}

TEST_CASE("overlapping hunks are rejected") {
  const char raw[] =
      "diff --git a/f b/f\n"
      "--- a/f\n"
      "+++ b/f\n"
      "@@ -1,3 +1,3 @@\n"
      " a\n"
      " b\n"
      " c\n"
      "@@ -2,1 +2,1 @@\n"
      "-b\n"
      "+B\n";
  CHECK_THROWS_AS(parse_unified_diff(raw), DiffParseError);
}
