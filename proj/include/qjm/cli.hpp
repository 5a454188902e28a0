#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qjm::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitCompatible = 0;
inline constexpr int kExitIncompatible = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitFailure = 3;  ///< computation failed (e.g. non-convergence)
inline constexpr int kExitUsage = 64;   ///< malformed input or arguments

/// Runs the `qjm` command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qjm::cli
