#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matchstab {

/// Dispatches one CLI invocation (args exclude the program name).
/// Exit codes: 0 success, 1 when an analysis answers "no", 2 on input errors.
int run_command(std::vector<std::string> args, std::ostream& out,
                std::ostream& err);

}  // namespace matchstab
