#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bmw {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_diverged = 2, exit_validation = 3 };

/// Entry point of the bmwsim tool. args excludes the program name.
/// Data goes to `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmw
