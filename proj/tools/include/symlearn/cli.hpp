#pragma once

#include <string>
#include <vector>

namespace symlearn::cli {

/// Run the tool with the given command line (program name excluded).
/// Returns the process exit code: 0 ok, 2 usage/config error, 3 IO/parse
/// error, 4 numeric failure.
int run(const std::vector<std::string>& args);

/// main() adapter.
int run(int argc, char** argv);

}  // namespace symlearn::cli
