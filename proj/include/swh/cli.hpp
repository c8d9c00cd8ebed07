#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace swh {

// Runs one swhtool invocation. `args` excludes the program name. Summaries
// go to `out` as one JSON line, logs and errors to `err`.
// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swh
