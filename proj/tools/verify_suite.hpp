#pragma once

#include <functional>
#include <string>

namespace twrn::cli {

// Invariant suite over bundled instances; used by the `verify` subcommand.
// Emits one line per check through `report` and returns the failure count.
// fast mode trims the random-instance counts.
int run_verify_suite(bool fast, const std::function<void(const std::string&)>& report);

}  // namespace twrn::cli
