#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gqdisc_cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,     // bad arguments, unreadable or malformed input, bad config
    kExitNumerical = 3, // degenerate data, Cholesky failure, infeasible fit
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gqdisc_cli
