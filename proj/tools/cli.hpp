#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace collatzlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInconsistent = 2;

/// Runs the command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version();

} // namespace collatzlab::cli
