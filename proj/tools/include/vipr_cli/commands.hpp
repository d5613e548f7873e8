#pragma once

#include <string>
#include <vector>

namespace vipr::cli {

/// Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 internal error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args exclude the program name

}  // namespace vipr::cli
