#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nk::cli {

// Executes one CLI invocation.  `args` excludes the program name.  All
// normal output (JSON records, CSV) goes to `out`; usage and error text
// goes to `err`.  Returns the process exit code: 0 success, 2 usage
// error, 3 infeasible size, 4 numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

} // namespace nk::cli
