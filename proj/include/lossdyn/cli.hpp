#pragma once

#include <optional>
#include <string>

namespace lossdyn::cli {

/// Outcome of one CLI command. `output` holds the rendered document;
/// `output_path` is the path requested by the config (if any); `diagnostic`
/// is a single line for standard error when exit_code != 0.
struct RunResult {
    int exit_code = 0;
    std::string output;
    std::optional<std::string> output_path;
    std::string diagnostic;
};

/// Parses the JSON config text and dispatches to the requested command.
/// `command_override` and `output_override` implement the corresponding
/// command-line flags. Exit codes: 0 success, 2 validation error,
/// 3 resonant frequency.
RunResult run(const std::string& config_text,
              const std::optional<std::string>& command_override = std::nullopt,
              const std::optional<std::string>& output_override = std::nullopt);

/// Shortest decimal string that round-trips to exactly `x`.
std::string format_shortest(double x);

} // namespace lossdyn::cli
