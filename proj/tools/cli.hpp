#pragma once

#include <exception>
#include <iosfwd>

namespace nrange::cli {

/// Runs one command line. Exit codes: 0 ok, 2 invalid input, 3 numerical failure.
/// Errors go to err as a one-line JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int exit_code(const std::exception& e);

}  // namespace nrange::cli
