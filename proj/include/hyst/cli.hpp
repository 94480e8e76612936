// Subcommand front end: simulate, stationary, verify, stability, longtime.
#pragma once

#include <string>
#include <vector>

namespace hyst {

int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // without program name

}  // namespace hyst
