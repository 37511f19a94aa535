#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace desctrack::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

/// Entry point of the `desctrack` tool; args exclude the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace desctrack::cli
