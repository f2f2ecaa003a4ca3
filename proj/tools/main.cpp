#include <CLI11.hpp>

#include <iostream>

#include "switchsde/driver.hpp"
#include "switchsde/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simulation and stability certification for switched delayed stochastic systems"};
    app.require_subcommand(1);

    switchsde::DriverOptions options;
    std::uint64_t seed_value = 0;
    double step_value = 0.0;
    int trials_value = 0;
    std::string reproduce_case = "constant";

    const auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* config = cmd->add_option("--config", options.config_path, "experiment configuration (JSON)");
        if (needs_config) config->required();
        cmd->add_option("--out", options.out_dir, "output directory");
        cmd->add_option("--seed", seed_value, "override simulation.seed")
            ->each([&](const std::string&) { options.seed = seed_value; });
        cmd->add_option("--step", step_value, "override simulation.h")
            ->each([&](const std::string&) { options.step = step_value; });
        cmd->add_option("--trials", trials_value, "override simulation.trials")
            ->each([&](const std::string&) { options.trials = trials_value; });
        cmd->add_option("--threads", options.threads,
                        "worker threads (default: SWITCHSDE_THREADS or hardware)");
    };

    auto* simulate = app.add_subcommand("simulate", "one switching path + trajectory to CSV");
    add_common(simulate, true);
    auto* mc = app.add_subcommand("mc", "Monte Carlo ensemble statistics");
    add_common(mc, true);
    auto* verify4 = app.add_subcommand("verify-thm4", "check the Theorem-4 certificate");
    add_common(verify4, true);
    verify4->add_flag("--dump-pi", options.dump_pi, "write each assembled Pi matrix as text");
    auto* verify5 = app.add_subcommand("verify-thm5", "check the Theorem-5 certificate");
    add_common(verify5, true);
    auto* halanay = app.add_subcommand("halanay", "integrate the Halanay comparison dynamics");
    add_common(halanay, true);
    auto* validate = app.add_subcommand("validate", "delay/nu/hypothesis validation report");
    add_common(validate, true);
    auto* reproduce = app.add_subcommand("reproduce", "reproduce the bundled example end to end");
    add_common(reproduce, false);
    reproduce->add_option("--case", reproduce_case, "constant | affine")
        ->check(CLI::IsMember({"constant", "affine"}));

    CLI11_PARSE(app, argc, argv);

    using switchsde::dispatch;
    if (simulate->parsed()) return dispatch(switchsde::run_simulate, options);
    if (mc->parsed()) return dispatch(switchsde::run_mc, options);
    if (verify4->parsed()) return dispatch(switchsde::run_verify_thm4, options);
    if (verify5->parsed()) return dispatch(switchsde::run_verify_thm5, options);
    if (halanay->parsed()) return dispatch(switchsde::run_halanay, options);
    if (validate->parsed()) return dispatch(switchsde::run_validate, options);
    if (reproduce->parsed()) {
        try {
            return switchsde::run_reproduce(reproduce_case, options);
        } catch (const switchsde::ConfigError& e) {
            std::cerr << "configuration error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 2;
}
