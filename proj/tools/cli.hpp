#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isoperc::tools {

/// Runs one command line (without the program name). Results go to `out` as a
/// JSON document carrying the run manifest, diagnostics to `err`. Returns 0 on
/// success, 2 for invalid input, 3 when the run itself fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace isoperc::tools
