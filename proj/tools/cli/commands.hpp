#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace poros::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,      // --expect mismatch, disagreement, pinned-row mismatch
  kExitInconclusive = 2,  // some verdict is inconclusive
  kExitError = 3,         // I/O, schema, usage or metric-axiom error
};

/// Entry point behind main(); `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string tool_version();

}  // namespace poros::cli
