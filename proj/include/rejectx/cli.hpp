#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rejectx::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_verification_failure = 1;
inline constexpr int exit_usage = 2;

/// Runs one subcommand (train, calibrate, explain, bench). `argv[0]` is the program name.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace rejectx::cli
