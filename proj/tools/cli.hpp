#pragma once

// Command-line front end. Exit codes: 0 success, 1 configuration or usage
// error, 2 numerical failure, 3 I/O failure.

#include <ostream>

namespace tvrls::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tvrls::cli
