#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace mlp::cli {

enum ExitCode { kPass = 0, kChecksFailed = 1, kUsage = 2, kRuntime = 3 };

struct Failure {
  std::string check;
  std::string detail;
};

struct RunResult {
  int exit_code = kPass;
  std::vector<Failure> failures;
  std::vector<std::string> artifacts;  // paths relative to the output dir
};

/// Executes `config`, writing artifacts under config.out: the verbatim
/// `source` text as config.txt, the resolved configuration as
/// resolved_config.txt, command outputs, and failures.csv. Throws
/// std::invalid_argument for a missing output directory.
RunResult run(const RunConfig& config, const std::string& source, std::ostream& log);

}  // namespace mlp::cli
