#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fermarkov {

enum ExitCode { kExitOk = 0, kExitVerdict = 1, kExitUsage = 2 };

/// Entry point of the command-line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fermarkov
