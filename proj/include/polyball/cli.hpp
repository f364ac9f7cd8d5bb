#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace polyball {

/// Exit codes: 0 ok, 1 bad input (parse or argument errors), 2 polyball
/// membership failure, 3 numerical instability, 4 any other failed check.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polyball
