#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "bifsim/error.hpp"
#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bifsim: two-drift ODEs driven by Brownian paths"};
    app.require_subcommand(1);
    app.set_version_flag("--version", BIFSIM_VERSION);

    std::string config_file;
    app.add_option("--config", config_file, "key = value or JSON config file; flags override it");
    std::map<std::string, std::string> flags;
    for (const auto& key : bifcli::config_keys()) app.add_option("--" + key, flags[key], bifcli::key_help(key));
    for (const auto& name : bifcli::command_names())
        app.add_subcommand(name, bifcli::command_help(name))->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        bifcli::RunConfig cfg;
        if (!config_file.empty()) bifcli::apply_file(cfg, config_file);
        for (const auto& key : bifcli::config_keys())
            if (app.count("--" + key) > 0) bifcli::set_key(cfg, key, flags[key]);
        return bifcli::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
    } catch (const bifsim::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
