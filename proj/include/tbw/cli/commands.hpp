#pragma once

#include <ostream>

namespace tbw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitRuntime = 4;

/// Entry point for the `tbw` binary: partition, generate, detect, attack,
/// evaluate. Failures print one JSON line {"error", "code", "message"} to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tbw::cli
