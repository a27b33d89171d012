#pragma once

namespace gtrans {

// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;
inline constexpr int kExitVerifyFailed = 3;

// Entry point of the `gtrans` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace gtrans
