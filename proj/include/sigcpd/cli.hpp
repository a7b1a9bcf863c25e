#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigcpd::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
/// Bad flags, malformed input files, failed validation or configuration.
inline constexpr int exit_invalid = 2;
/// Series too short for the requested analysis.
inline constexpr int exit_too_short = 3;

/// Runs the command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace sigcpd::cli
