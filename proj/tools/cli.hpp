#ifndef HYCA_TOOLS_CLI_HPP
#define HYCA_TOOLS_CLI_HPP

#include <ostream>

namespace hyca::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // bad flags, validation failures
inline constexpr int kExitIo = 3;         // unreadable/unwritable or malformed files
inline constexpr int kExitNumerical = 4;  // overflow, non-finite results

/// Runs one hyca invocation. Human-readable text goes to `out`, diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyca::cli

#endif  // HYCA_TOOLS_CLI_HPP
