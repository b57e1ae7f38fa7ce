#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace softqos::cli {

/// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace softqos::cli
