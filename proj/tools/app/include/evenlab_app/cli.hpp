#pragma once

#include <iosfwd>

namespace evenlab::app {

// Exit codes of the evenlab tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdictFail = 1;
inline constexpr int kExitUsage = 2;  // parse, validation and structural errors
inline constexpr int kExitCapacity = 3;

// Parses argv (flags > --config TOML file > defaults), runs the experiment
// and writes the report. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& err);

}  // namespace evenlab::app
