#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spsense::cli {

/// Exit codes: 0 success, 1 usage error, 2 unexpected failure, and
/// 10 + ErrorCode for library errors (see README).
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInternal = 2;
inline constexpr int kExitErrorBase = 10;

/// Runs the CLI with `args` (args[0] is the program name). The result
/// document, or an error object, goes to `out` unless --output names a file;
/// human-readable messages and warnings go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spsense::cli
