#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "lossdyn/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis of two-component dissipative systems"};

    std::string config_path;
    std::string output_path;
    std::string command;
    int seed = 0;  // reserved; no randomized algorithms yet
    app.add_option("--config", config_path, "Path to the JSON run configuration")->required();
    app.add_option("--output", output_path, "Override the output path from the config");
    app.add_option("--command", command, "Override the command from the config");
    app.add_option("--seed", seed, "Reserved for future randomized algorithms");

    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config file '" << config_path << "'\n";
        return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    std::optional<std::string> command_override;
    if (!command.empty()) command_override = command;
    std::optional<std::string> output_override;
    if (!output_path.empty()) output_override = output_path;

    lossdyn::cli::RunResult result =
        lossdyn::cli::run(buffer.str(), command_override, output_override);

    if (result.exit_code != 0) {
        std::cerr << "error: " << result.diagnostic << "\n";
        return result.exit_code;
    }
    if (result.output_path) {
        std::ofstream out(*result.output_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open output file '" << *result.output_path << "'\n";
            return 2;
        }
        out << result.output;
    } else {
        std::cout << result.output;
    }
    return 0;
}
