// bfsurf_main.cpp -- command line front end.
//
//   bfsurf run <config> [--output-dir DIR] [--seed N]
//   bfsurf resume <checkpoint> [--output-dir DIR]
//   bfsurf verify
//
// Exit code 0 on success, nonzero on any invariant violation, solver
// failure or configuration error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bfsurf/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bfsurf: binary fluid-surfactant phase-field solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string checkpoint_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool dir_set = false;

    CLI::App* run = app.add_subcommand("run", "execute a run described by a config file");
    run->add_option("config", config_path, "key = value configuration file")->required();
    run->add_option("--output-dir", output_dir, "override the configured output directory")
        ->each([&](const std::string&) { dir_set = true; });
    run->add_option("--seed", seed, "override the configured seed")
        ->each([&](const std::string&) { seed_set = true; });

    CLI::App* resume = app.add_subcommand("resume", "continue a run from a checkpoint");
    resume->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    resume->add_option("--output-dir", output_dir, "override the output directory")
        ->each([&](const std::string&) { dir_set = true; });

    CLI::App* verify = app.add_subcommand("verify", "run the property suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            bfsurf::RunManifest m = bfsurf::parse_config_file(config_path);
            if (dir_set) m.output_dir = output_dir;
            if (seed_set) m.seed = seed;
            return bfsurf::run_manifest(m, std::cout);
        }
        if (resume->parsed()) {
            std::optional<std::string> dir;
            if (dir_set) dir = output_dir;
            return bfsurf::resume_checkpoint(checkpoint_path, dir, std::cout);
        }
        if (verify->parsed()) return bfsurf::run_property_suite(std::cout) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
