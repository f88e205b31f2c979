#pragma once

#include <iosfwd>

namespace fracexp {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,     // invalid configuration or expression
    kExitNumerical = 3,  // engine failure
    kExitIo = 4,         // output could not be written
};

/// Runs the command line; reports go to `out` (or a file), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracexp
