#pragma once

#include <string>
#include <vector>

namespace ftf {

// Runs one CLI invocation; argv-style arguments without the program name.
// Returns the process exit code. Used by the ftf-sim binary and called
// in-process by the test suite.
int run_cli(const std::vector<std::string>& args);

}  // namespace ftf
