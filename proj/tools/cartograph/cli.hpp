#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cartograph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one `cartograph <subcommand> ...` invocation (args exclude argv[0]).
// Data goes to files or `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cartograph::cli
