#pragma once

#include <iosfwd>

namespace subfinsler::cli {

/// Entry point of the subfinsler tool. Exit codes: 0 success, 1 validation
/// failure (a check did not pass or the numerics raised), 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace subfinsler::cli
