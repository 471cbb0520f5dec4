#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace profdec::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInvariant = 3 };

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace profdec::cli
