#pragma once

#include <iosfwd>

namespace scout::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
// Library errors exit with kExitErrorBase + static_cast<int>(ErrorCode).
inline constexpr int kExitErrorBase = 3;

// Parses argv and dispatches. Errors are reported as one `Name: message` line on err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scout::cli
