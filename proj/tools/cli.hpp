#pragma once

#include <string>
#include <vector>

namespace twrn::cli {

// Entry point behind the twrn-rd binary. args excludes the program name.
// Exit codes: 0 success, 2 validation/input error, 3 solver non-convergence
// (results are still written).
int run(const std::vector<std::string>& args);

}  // namespace twrn::cli
