#pragma once

#include <iosfwd>

namespace rwb {

/// Exit codes of the command-line tool.
enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitBlowUp = 2, kExitViolations = 3 };

/// Entry point of the `rwb` tool; writes normal output to out and
/// diagnostics to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rwb
