#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bkhm {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_validation = 2, exit_numerical = 3, exit_oracle = 4 };

/// Run one `bkhm` subcommand. args[0] is the program name.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bkhm
