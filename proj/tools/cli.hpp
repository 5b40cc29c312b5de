#ifndef HSIBAND_TOOLS_CLI_HPP
#define HSIBAND_TOOLS_CLI_HPP

#include <string>
#include <vector>

namespace hsiband::cli {

/// Parses `args` (program name excluded) and runs the requested subcommand.
/// Returns the process exit code: 0 on success, 2 on usage or validation
/// errors, 1 on internal failures. Exposed as a function so the test harness
/// can drive the tool in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace hsiband::cli

#endif
