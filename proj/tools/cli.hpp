#pragma once

#include <ostream>

namespace trendlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the trendlab command, callable in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trendlab::cli
