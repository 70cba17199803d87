#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbfe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Batch command line entry point. `args` excludes the program name.
/// Returns 0 on success, 1 on usage errors and 2 on data/validation errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbfe
