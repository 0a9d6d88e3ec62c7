#pragma once

#include <string>
#include <vector>

namespace regnn {

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 failed verification, 2 usage or input error.
int run_command(const std::vector<std::string>& args);

}  // namespace regnn
