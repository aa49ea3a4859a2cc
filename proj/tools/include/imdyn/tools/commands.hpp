#pragma once

#include <iosfwd>

namespace imdyn::tools {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_divergence = 2;
inline constexpr int exit_conditions_fail = 3;

/// Entry point of the `imdyn` command: simulate | figure | check | rates.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace imdyn::tools
