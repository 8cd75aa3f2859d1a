#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfp::cli {

enum ExitCode : int {
    Success = 0,
    Failure = 1,
    ProtocolMismatch = 2,
    SchemaError = 3,
    SolverFailure = 4,
};

/// Edge length and load steps of the --quick profile (the leading 10
/// steps of the standard program on a coarser mesh).
inline constexpr double quick_edge_length = 6.0;
inline constexpr int quick_load_steps = 10;

/// Runs one subcommand (generate, match, rank, simulate, ingest, inspect).
/// args[0] is the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads "key = value" lines ('#' starts a comment) into flag arguments:
/// "jobs = 4" becomes {"--jobs", "4"}, "quick = true" becomes {"--quick"}.
/// Throws ParseError naming the line on malformed input.
std::vector<std::string> config_arguments(const std::string& text, const std::string& source);

} // namespace mfp::cli
