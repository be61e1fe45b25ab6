#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stackgrasp::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsageFailure = 2;

// Runs one command line (args[0] is the program name). Results go to `out`,
// the categorized error line "error[Kind]: message" to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace stackgrasp::cli
