#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace intentforge::cli {

/// Parses argv and runs one command. Returns the process exit code:
/// 0 on success, 1 on a library error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace intentforge::cli
