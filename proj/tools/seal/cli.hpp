#pragma once

#include <iosfwd>

namespace seal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one `seal` command. Results go to `out`; diagnostics and errors go
/// to `err` (as JSON when --json is given).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seal
