#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ctaudit {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;     // malformed input or usage
inline constexpr int kExitAnalysis = 3;  // validation or domain failure
inline constexpr int kExitMismatch = 4;  // replicate disagrees with reference values

/// Runs the command line `args` (without the program name). Output goes to
/// `out` unless --out is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctaudit
