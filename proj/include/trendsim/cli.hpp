#pragma once

#include <iosfwd>

namespace trendsim {

/// Entry point of the `trendsim` executable. Returns 0 on success, 1 on input or usage
/// errors, 2 on internal failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trendsim
