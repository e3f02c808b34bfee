#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsmbs {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitIo = 3,
    kExitParse = 4,
    kExitSolver = 5,
    kExitInternal = 6,
};

// subcommands simulate, spectral, converge, modes; args exclude the program name
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsmbs
