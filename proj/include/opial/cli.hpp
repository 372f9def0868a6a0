#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace opial::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;   ///< an instance failed, or a hypothesis/numerical failure
inline constexpr int kInvalid = 2;  ///< bad flags or config

/// Runs the command line `args` (without the program name). Reports go to `out` unless
/// --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "%.17g", with inf and nan spelled out.
std::string format_number(double x);

}  // namespace opial::cli
