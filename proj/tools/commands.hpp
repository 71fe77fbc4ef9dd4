#pragma once

// The `minos` command-line surface. Kept out of main() so tests can drive
// every subcommand in-process.

#include <ostream>
#include <string>
#include <vector>

namespace minos::cli {

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`; failures are reported on `err` as a one-line JSON object and yield
/// a non-zero exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace minos::cli
