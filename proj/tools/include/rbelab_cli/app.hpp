#pragma once

#include <iosfwd>

namespace rbelab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Name of the environment variable that holds the directory for relative
/// --output paths.
inline constexpr const char* kOutputDirEnv = "RBELAB_OUTPUT_DIR";

/// Parses the command line, runs the command and writes results to --output
/// or `out`. Diagnostics go to `err`. Returns the process exit status.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbelab::cli
