#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vesselfuse {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitProcessingError = 2 };

/// Runs the command line; args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vesselfuse
