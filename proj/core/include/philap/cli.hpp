#pragma once

#include <string>
#include <vector>

namespace philap::cli {

// Entry point shared by the binary and the in-process tests.
// Exit codes: 0 success, 1 input error, 2 numerical failure.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace philap::cli
