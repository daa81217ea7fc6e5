// process.hpp — minimal subprocess runner used for invoking git.
#pragma once

#include <string>
#include <vector>

namespace linespots {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;

  bool ok() const { return exit_code == 0; }
};

// Runs argv[0] with the given arguments, feeding `input` to stdin and
// capturing stdout/stderr. Streams are serviced with poll() so large
// inputs (fast-import streams, cat-file batches) cannot deadlock.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& input = {});

// Same, but throws std::runtime_error (including captured stderr) on a
// non-zero exit code or spawn failure.
std::string run_process_checked(const std::vector<std::string>& argv,
                                const std::string& input = {});

}  // namespace linespots
