#pragma once

#include <iosfwd>

namespace mltc::cli {

/// Entry point of the `mltc` tool. Returns the process exit status: 0 on
/// success, 1 on a failed command, 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mltc::cli
