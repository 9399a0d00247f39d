#pragma once

#include <iosfwd>

namespace hvd {

// Entry point of the hvd-scout command line. Exit status: 0 on success,
// 1 on operational errors, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hvd
