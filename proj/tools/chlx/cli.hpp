#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one pipeline stage. args excludes the program name. The summary
/// line goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chl::cli
