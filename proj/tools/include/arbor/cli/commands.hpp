#pragma once

// The `arbor` command line, callable in-process so tests can drive it.
//
// Exit codes: 0 success, 1 a verification failed, 2 usage or domain error.

#include <iosfwd>
#include <string>
#include <vector>

namespace arbor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a..b" (empty when a > b), "a,b,c" or a single integer.
std::vector<int> parse_int_range(const std::string& text);

}  // namespace arbor::cli
