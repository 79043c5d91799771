#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thermoscan {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the thermoscan tool. args[0] is the program name.
/// Returns 0 on success, 1 on usage errors, 2 on data or contract errors (anchor lost included).
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thermoscan
