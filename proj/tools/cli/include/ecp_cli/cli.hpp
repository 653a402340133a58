#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ecp::cli {

// Runs one `ecp` invocation; args excludes the program name. Returns the
// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecp::cli
