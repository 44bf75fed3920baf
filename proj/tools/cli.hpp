#pragma once

#include <string>
#include <vector>

namespace wltls::cli {

// Runs the command line tool on the given arguments (program name excluded).
// Returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace wltls::cli
