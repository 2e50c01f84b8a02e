#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace msmgraph {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInfeasible = 3,
};

/// Runs one command line (without the program name). Machine-readable
/// records go to `out`, diagnostics to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace msmgraph
