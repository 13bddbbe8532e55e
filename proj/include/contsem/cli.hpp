#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace contsem::cli {

/// Runs one command line (without the program name). Writes the report to
/// out and diagnostics to err. Returns 0 on success, 1 on validation,
/// precondition or law failure, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace contsem::cli
