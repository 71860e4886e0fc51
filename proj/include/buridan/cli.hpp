#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace buridan {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_numerical = 2,
  exit_comparison = 3,
};

/// Runs the `buridan` command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace buridan
