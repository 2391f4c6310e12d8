#pragma once

#include <string>
#include <vector>

namespace taxo::cli {

// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
int run(const std::vector<std::string>& args);  // args[0] is the program name
int run(int argc, const char* const* argv);

}  // namespace taxo::cli
