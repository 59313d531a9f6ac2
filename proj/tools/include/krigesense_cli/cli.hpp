#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace krigesense::cli {

enum ExitCode : int { success = 0, numerical_failure = 1, usage_error = 2 };

// Runs one subcommand. `args` excludes the program name. CSV goes to the
// --out path (or `out`); diagnostics and, without --out, the manifest go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krigesense::cli
