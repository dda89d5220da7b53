#pragma once

namespace pmeta::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;  // unreadable or malformed input/output files
inline constexpr int kExitUsage = 3;  // bad flags or invalid flag/data combinations

// Entry point for the pmeta binary; also called directly by tests.
int run(int argc, const char* const* argv);

}  // namespace pmeta::cli
