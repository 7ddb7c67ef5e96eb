#pragma once

#include <string>
#include <vector>

namespace nearshore::cli {

/// Exit codes: 0 success, 1 runtime/validation failure, 2 usage error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace nearshore::cli
