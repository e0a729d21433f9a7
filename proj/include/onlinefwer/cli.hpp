#pragma once

#include <iosfwd>

namespace ofwer {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 2,
    kExitConfigError = 3,
    kExitAuditFailure = 4,
};

// Entry point of the onlinefwer tool; `out` receives tables, `err` messages.
// Subcommands: run, experiment, solve, validate.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ofwer
