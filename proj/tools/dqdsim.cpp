// dqdsim: experiment runner for continuously measured double quantum dots.
//
//   dqdsim run <config>
//   dqdsim scenario <name> [--seed N] [--out DIR] [--print-config]
//   dqdsim validate <config>
//
// DQD_WORKERS overrides the number of ensemble worker threads.

#include <CLI11.hpp>
#include <iostream>

#include "dqd/config.hpp"
#include "dqd/runner.hpp"

namespace {

int report_files(const dqd::RunOutcome& outcome) {
    for (const auto& f : outcome.files) std::cout << f << '\n';
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditioned-state simulator for a double dot measured by a point contact"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
    run_cmd->add_option("config", config_path, "Config file")->required();

    std::string scenario_name;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool print_config = false;
    auto* scen_cmd = app.add_subcommand("scenario", "Run a named preset");
    scen_cmd->add_option("name", scenario_name, "fig1 | fig2a | fig2b | fig2c | purify | steer-demo")->required();
    auto* seed_opt = scen_cmd->add_option("--seed", seed, "RNG master seed");
    scen_cmd->add_option("--out", out_dir, "Output directory");
    scen_cmd->add_flag("--print-config", print_config, "Print the preset config and exit");

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("validate", "Parse a config and print the validity checks");
    val_cmd->add_option("config", validate_path, "Config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const dqd::RunConfig cfg = dqd::load_config(config_path);
            return report_files(dqd::run(cfg, std::cerr));
        }
        if (*scen_cmd) {
            dqd::RunConfig cfg = dqd::scenario(scenario_name);
            if (*seed_opt) cfg.grid.seed = seed;
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (print_config) {
                std::cout << dqd::to_config_text(cfg);
                return 0;
            }
            return report_files(dqd::run(cfg, std::cerr));
        }
        if (*val_cmd) {
            const dqd::RunConfig cfg = dqd::load_config(validate_path);
            for (const auto& r : dqd::validity_reports(cfg))
                std::cout << (r.pass ? "ok      " : "warning ") << r.check << ": " << r.message << '\n';
            return 0;
        }
    } catch (const dqd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
