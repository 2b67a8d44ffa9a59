#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curveforge::cli {

/// Exit statuses of `run`.
enum ExitCode : int {
    kSuccess = 0,
    kDomainError = 1,
    kUsageError = 2,
};

/// Runs one subcommand. `args` excludes the program name. Outputs go to the
/// directory given by --out, else $CURVEFORGE_OUTPUT_DIR, else the working
/// directory; each run appends one line to run_log.jsonl there.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace curveforge::cli
