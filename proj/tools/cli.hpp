#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lrac::cli {

// Exit codes: 0 all checks pass, 1 study failed, 2 invalid configuration.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lrac::cli
