#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radbif {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitMath = 2 };

/// Runs one `radbif` invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands `--config FILE` into `--key value` arguments placed right after the subcommand,
/// so explicit flags (parsed later) take precedence. Throws radbif::Error on unreadable files
/// or malformed lines.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace radbif
