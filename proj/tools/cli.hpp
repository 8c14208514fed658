#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vl {

// Parses `args` (without the program name) and runs the selected command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vl
