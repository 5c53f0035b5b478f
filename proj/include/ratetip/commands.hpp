#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ratetip {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the ratetip command-line tool. Writes results to `out`
/// and diagnostics to `err`; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ratetip
