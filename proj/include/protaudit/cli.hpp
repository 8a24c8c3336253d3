#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace protaudit {

// Entry point of the `audit` tool. Returns 0 on success, 1 on validation
// errors (including stage-order and usage errors) and 2 on backend failures.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace protaudit
