#pragma once

#include <ostream>

namespace oscrit::cli {

/// Runs the command line (argv[0] is the program name). Exit code 0 when the
/// command ran (whatever the verdicts), 2 on configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oscrit::cli
