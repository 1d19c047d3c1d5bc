#pragma once

#include <iosfwd>

namespace recomb::cli {

// Exit codes of the command-line front-end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

// Entry point for `recomb <solve|verify|spectrum> ...`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recomb::cli
