#pragma once

#include <iosfwd>

namespace smartbeta::cli {

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Runs one command. Normal output goes to `out`; errors are written to `err`
/// as a single line `error: <kind>: <message>`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smartbeta::cli
