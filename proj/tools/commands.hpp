#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lde::cli {

/// Exit codes: 0 success, 1 bad input or numerical failure, 2 an internal
/// consistency check of the command failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailed = 2;

/// Runs the command line `args` (program name excluded). Payloads go to `out`
/// unless --out/--outdir is given; errors are JSON objects on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lde::cli
