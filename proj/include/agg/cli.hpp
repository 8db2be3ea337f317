#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace agg {

/// Exit codes: 0 success, 1 validation error, 2 runtime error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agg
