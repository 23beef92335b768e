#pragma once

#include <iosfwd>

namespace proxident {

/// Entry point of the `proxident` command. Exit codes: 0 success, 1 usage
/// or data error, 2 solver stopped at max_iter.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace proxident
