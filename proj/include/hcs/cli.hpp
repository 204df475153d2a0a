#pragma once
// Command-line front end. Every subcommand reads one JSON config document and
// writes under <output_root>/<run_id>/<name>/ together with a provenance
// record and a verbatim copy of the config.

#include <string>
#include <vector>

namespace hcs::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kDataError = 3,
    kRuntimeError = 4,
};

/// Environment variable overriding the config's output_root.
inline constexpr const char* kOutputRootEnv = "HCS_OUTPUT_ROOT";

/// Parses arguments (argv[0] is the program name) and runs one subcommand.
/// Never throws; failures map to the exit codes above with a message on stderr.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace hcs::cli
