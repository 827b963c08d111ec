#pragma once

// Experiment runner. Every scenario is a subcommand reading a JSON config
// (built-in defaults, then --config FILE, then --override key=value) and
// writing canonical JSON and CSV into --out DIR.

#include <ostream>
#include <string>
#include <vector>

namespace specbound {

enum ExitCode : int { kExitOk = 0, kExitVerificationFailure = 1, kExitInputError = 2 };

/// `args` excludes the program name. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specbound
