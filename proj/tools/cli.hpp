#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stylodet::cli {

// Runs one command line (without the program name). Returns the exit code:
// 0 on success, 1 on a runtime error, 2 on a usage error. Diagnostics go to
// `err` as `error[<code>]: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stylodet::cli
