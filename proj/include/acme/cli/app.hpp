#pragma once

#include <iosfwd>

namespace acme::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;

// Entry point of the acme-sim tool. Returns the process exit status:
// 0 success, 1 configuration error, 2 data or output error. With several
// --config files each one is an independent scenario and the worst status
// wins.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace acme::cli
