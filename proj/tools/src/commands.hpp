#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cli {

// Runs one CLI invocation in-process. args excludes the program name.
// Exit codes: 0 success, 1 usage/validation, 2 numerical degeneracy,
// 3 validation-suite failure.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

} // namespace cli
