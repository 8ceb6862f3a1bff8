#pragma once

#include <iostream>

namespace polygrad {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitVerifyFailed = 2;

/// Entry point of the polygrad tool: bandit2d, fourroom, verify, scale-table.
int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace polygrad
