#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/table.hpp"

namespace padland::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_refusal = 3 };

Table cmd_kernel(const RunConfig& config);
Table cmd_symbol(const RunConfig& config);
Table cmd_heat(const RunConfig& config);
Table cmd_solve(const RunConfig& config);
Table cmd_survival(const RunConfig& config);
Table cmd_volterra(const RunConfig& config);
Table cmd_mc(const RunConfig& config);

/// Dispatches on config.command.
Table run_command(const RunConfig& config);

/// Full front end: parses args (without the program name), runs the command and
/// writes the table to `out` or to the configured file. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace padland::cli
