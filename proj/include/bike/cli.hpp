#pragma once

#include <iosfwd>

namespace bike {

// Dispatches argv to the library. Exit codes: 0 success, 1 a check failed,
// 2 usage or I/O error. Seeds come from --seed, falling back to the
// BIKE_SEED environment variable, then 0.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bike
