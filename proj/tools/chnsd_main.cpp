#include "chnsd/drivers.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"chnsd: two-phase flow in coupled free-flow and porous layers"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto add_mode = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        return sub;
    };
    add_mode("run", "time integration with VTK and energy output");
    add_mode("converge_space", "mesh-refinement accuracy study on the manufactured solution");
    add_mode("converge_time", "time-step accuracy study on the manufactured solution");
    add_mode("compare_schemes", "coupled vs decoupled energy histories on identical inputs");

    CLI11_PARSE(app, argc, argv);

    try {
        chnsd::Config cfg = chnsd::load_config(config_path);
        cfg.mode = chnsd::mode_from_name(app.get_subcommands().front()->get_name());
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        chnsd::run_experiment(cfg);
        return 0;
    } catch (const chnsd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
