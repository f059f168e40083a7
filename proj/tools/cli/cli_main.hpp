#pragma once

#include <string>
#include <vector>

namespace qhall::cli {

// Full command-line entry point; returns the process exit code.  Split from
// main() so tests can drive every subcommand in-process.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace qhall::cli
