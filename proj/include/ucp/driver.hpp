#pragma once

#include "ucp/config.hpp"
#include "ucp/report_io.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace ucp {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitUsage = 2 };

struct RunResult {
  int exit_code = kExitPass;
  Json report;
  std::map<std::string, std::string> files;  // file name -> contents
};

/// Executes the command without touching the file system. Throws ConfigError
/// on validation problems.
RunResult run(const RunConfig& cfg, std::ostream& log);

/// validate + run + write report.json and CSVs into cfg.out atomically.
/// Returns the process exit code; configuration errors print a diagnostic
/// to `err` and return kExitUsage.
int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace ucp
