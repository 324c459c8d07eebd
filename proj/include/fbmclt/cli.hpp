#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fbmclt {

/// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitDomain = 4,
  kExitNumerical = 5,
  kExitConvergence = 6,
  kExitPartial = 7,
  kExitIo = 8,
};

/// Exit code for an error kind as reported by Error::kind().
int exit_code_for(std::string_view kind);

/// Entry point of the `fbmclt` tool. args[0] is the program name. The report
/// goes to --output (or `out` when absent or "-"); the one-line summary and
/// diagnostics go to `err` when the report uses `out`, else the summary goes
/// to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbmclt
