#pragma once
// Subcommand surface of the reckg binary, callable in-process for tests.

#include <iosfwd>
#include <string>
#include <vector>

#include "reckg/error.hpp"

namespace reckg::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kDataError = 3,
    kMissingMatchKey = 4,
    kUnknownNode = 5,
    kWriteFailure = 6,
};

/// Exit code for a library error family.
int exit_code_for(ErrorCode code);

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Applies RECKG_LOG (trace, debug, info, warn, error, off) to the stderr logger.
void configure_logging();

}  // namespace reckg::cli
