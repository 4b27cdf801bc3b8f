#include <CLI11.hpp>
#include <iostream>

#include "spiralwave/harness.hpp"

int main(int argc, char** argv) {
    using namespace spiralwave;
    CLI::App app{"Spiral wave dynamics in rectangular domains"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    for (const std::string& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const ExperimentConfig cfg = load_config(config_path);
        run_command(command, cfg, out_dir);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
