#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace disslab::cli {

enum ExitCode : int { kOk = 0, kError = 1, kCheckFailed = 2 };

// Runs one pipeline command. args excludes the program name:
//   <command> [--config PATH] [--out DIR] [--seed N] [--threads N] [--strict]
// Commands: generate, besov, decompose, verify-identity, rates, sf, dims, bounds, sweep, report.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const std::vector<std::string>& commands();

}  // namespace disslab::cli
