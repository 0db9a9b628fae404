#pragma once

#include <string>
#include <vector>

namespace hpa::cli {

/// Exit codes of the command-line tool.
enum ExitCode {
    exit_ok = 0,
    exit_validation = 2, ///< bad config / usage
    exit_no_root = 3,    ///< no bifurcation in the requested regime
    exit_solver = 4      ///< numerical failure
};

/// Run the tool: subcommands fit, stability, critical, region-scan,
/// simulate, simulate-frac. Returns an ExitCode value.
int run(int argc, const char* const* argv);

} // namespace hpa::cli
