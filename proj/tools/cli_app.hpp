#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmts::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Runs `hmts <args...>` (args excludes the program name). Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hmts::cli
