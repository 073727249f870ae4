#pragma once

#include <iosfwd>

namespace colier::cli {

/// Entry point behind the `colier` binary. Returns the process exit code:
/// 0 success, 1 runtime failure (or a non-converged simulation), 2 usage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace colier::cli
