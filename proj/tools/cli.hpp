#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cycip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotSolved = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. args excludes the program name.
/// Exit codes: 0 success, 1 solver did not reach the tolerance (solve only),
/// 2 usage, parse or I/O error (message on err).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cycip::cli
