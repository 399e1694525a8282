#pragma once

#include <iosfwd>

namespace hjdebt {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitHypothesis = 3, kExitNumerical = 4 };

/// Entry point of the hjdebt tool; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hjdebt
