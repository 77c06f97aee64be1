#pragma once

#include <iosfwd>

namespace gridforge {

/// Runs one command line. Exit codes: 0 success, 1 mathematical negative,
/// 2 usage or domain error, 3 validation or internal failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gridforge
