#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lrrfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

/// Runs one command line (without the program name) and returns the exit code.
/// Normal output goes to `out`; diagnostics and warnings go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrrfuse::cli
