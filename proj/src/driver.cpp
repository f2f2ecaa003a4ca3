#include "switchsde/driver.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "example_configs.hpp"
#include "switchsde/config.hpp"
#include "switchsde/io.hpp"

namespace switchsde {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ExperimentConfig load_config(const DriverOptions& options) {
    if (options.config_path.empty()) throw ConfigError("no --config path given");
    ExperimentConfig cfg = ExperimentConfig::load(options.config_path);
    if (options.seed) cfg.simulation.seed = *options.seed;
    if (options.step) cfg.simulation.h = *options.step;
    if (options.trials) cfg.simulation.trials = *options.trials;
    cfg.cross_validate();
    return cfg;
}

fs::path ensure_out_dir(const DriverOptions& options) {
    const fs::path dir(options.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

McOptions mc_options(const ExperimentConfig& cfg, const DriverOptions& options) {
    McOptions mc;
    mc.h = cfg.simulation.h;
    mc.horizon = cfg.simulation.horizon;
    mc.trials = cfg.simulation.trials;
    mc.seed = cfg.simulation.seed;
    mc.epsilons = cfg.simulation.epsilons;
    mc.threads = options.threads;
    return mc;
}

int verify_with(const DriverOptions& options, bool thm5_variant) {
    const ExperimentConfig cfg = load_config(options);
    const fs::path dir = ensure_out_dir(options);

    CheckResult result;
    std::string name;
    if (thm5_variant) {
        if (!cfg.thm5) throw ConfigError("config has no certificate_thm5 section");
        result = check_thm5(cfg.model, *cfg.thm5, cfg.family, cfg.rates);
        name = "thm5";
    } else {
        if (!cfg.thm4) throw ConfigError("config has no certificate_thm4 section");
        result = check_thm4(cfg.model, *cfg.thm4, cfg.family, cfg.rates);
        name = "thm4";
    }
    write_file((dir / (name + "_report.json")).string(), to_json(result).dump(2) + "\n");

    if (options.dump_pi && !thm5_variant) {
        for (const ChiClass& cls : chi_classes(cfg.family, cfg.thm4->P, cfg.rates)) {
            const Eigen::MatrixXd pi = build_pi(cfg.model, *cfg.thm4, cls.chi, cls.mode);
            std::string label = cls.label;
            for (char& c : label)
                if (c == ' ' || c == ',' || c == '(' || c == ')') c = '_';
            write_file((dir / ("pi_" + label + ".txt")).string(), matrix_to_text(pi));
        }
    }

    std::cout << name << ": " << (result.pass ? "PASS" : "FAIL")
              << "  worst lambda_max = " << result.worst_lambda_max << " (" << result.worst_label
              << ")" << (result.conservative ? "  [conservative chi bound]" : "") << "\n";
    return result.pass ? 0 : 1;
}

}  // namespace

int run_simulate(const DriverOptions& options) {
    const ExperimentConfig cfg = load_config(options);
    const fs::path dir = ensure_out_dir(options);

    const SwitchingPath path = sample_path(cfg.family, cfg.rates, cfg.initial_mode,
                                           cfg.simulation.horizon, cfg.simulation.seed);
    const InitialSegment init = cfg.simulation.initial_segment();
    const Trajectory traj = integrate(cfg.model, path, cfg.delay, init, cfg.simulation.h,
                                      cfg.simulation.horizon, cfg.simulation.seed);

    std::ostringstream path_table;
    path.write_table(path_table);
    write_file((dir / "switching_path.txt").string(), path_table.str());

    std::ostringstream csv;
    traj.write_csv(csv);
    write_file((dir / "trajectory.csv").string(), csv.str());

    std::cout << "simulate: " << traj.times.size() << " grid points, " << path.jump_count()
              << " switches, final |x| = " << traj.states.back().norm() << "\n";
    return 0;
}

int run_mc(const DriverOptions& options) {
    const ExperimentConfig cfg = load_config(options);
    const fs::path dir = ensure_out_dir(options);
    const InitialSegment init = cfg.simulation.initial_segment();

    std::optional<LyapunovV1Spec> v1;
    if (cfg.thm4) v1 = LyapunovV1Spec::from(*cfg.thm4, cfg.nu);

    const McStats stats =
        mc_ensemble(cfg.model, cfg.family, cfg.rates, cfg.initial_mode, cfg.delay, init, cfg.nu,
                    mc_options(cfg, options), v1 ? &*v1 : nullptr);

    std::ostringstream csv;
    stats.write_csv(csv);
    write_file((dir / "mc_stats.csv").string(), csv.str());

    const Classification classification = classify_stability(stats, cfg.nu, cfg.classification);
    json summary;
    summary["classification"] = to_json(classification);
    summary["trials"] = stats.trials;
    summary["diverged"] = stats.diverged;
    summary["final_mean_x2"] = stats.mean_x2.back();
    if (stats.has_V) summary["supermartingale"] = to_json(supermartingale_check(stats, cfg.simulation.h));
    write_file((dir / "mc_summary.json").string(), summary.dump(2) + "\n");

    std::cout << "mc: " << stats.trials << " trials (" << stats.diverged
              << " diverged), mean |x(T)|^2 = " << stats.mean_x2.back() << "\n";
    return 0;
}

int run_verify_thm4(const DriverOptions& options) { return verify_with(options, false); }

int run_verify_thm5(const DriverOptions& options) { return verify_with(options, true); }

int run_halanay(const DriverOptions& options) {
    const ExperimentConfig cfg = load_config(options);
    if (!cfg.halanay) throw ConfigError("config has no halanay section");
    const fs::path dir = ensure_out_dir(options);

    const HalanayReport report =
        halanay_bound_check(*cfg.halanay, cfg.simulation.h, cfg.simulation.horizon);
    write_file((dir / "halanay_report.json").string(), to_json(report).dump(2) + "\n");

    if (report.precondition_ok) {
        const HalanaySeries series =
            halanay_integrate(*cfg.halanay, cfg.simulation.h, cfg.simulation.horizon);
        std::string csv = "t,u\n";
        for (std::size_t j = 0; j < series.times.size(); ++j)
            csv += fmt17(series.times[j]) + "," + fmt17(series.values[j]) + "\n";
        write_file((dir / "halanay_series.csv").string(), csv);
    }

    std::cout << "halanay: " << (report.pass ? "PASS" : "FAIL") << "  bound = " << report.bound
              << ", max violation = " << report.max_violation << "\n";
    return report.pass ? 0 : 1;
}

int run_validate(const DriverOptions& options) {
    const ExperimentConfig cfg = load_config(options);
    const fs::path dir = ensure_out_dir(options);

    const std::vector<double> grid = default_grid(cfg.simulation.horizon);
    const DelayReport delay_report = validate_delay(cfg.delay, grid);
    const NuConstants constants = nu_constants(cfg.nu, cfg.delay, grid);
    const std::vector<Eigen::MatrixXd>* p_family = cfg.thm4 ? &cfg.thm4->P : nullptr;
    const HypothesisReport hyp =
        validate_hypotheses(cfg.model, 512, 2.0, cfg.simulation.seed, p_family);

    json report;
    report["delay"] = to_json(delay_report);
    report["nu_constants"] = to_json(constants);
    report["hypotheses"] = to_json(hyp);
    const bool pass = delay_report.pass && hyp.pass;
    report["pass"] = pass;

    write_file((dir / "validate.json").string(), report.dump(2) + "\n");
    write_file((dir / "validate.txt").string(), to_key_value_text(report));

    std::cout << "validate: " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

std::string example_config_text(const std::string& which) {
    if (which == "constant") return embedded::kExampleConstant;
    if (which == "affine") return embedded::kExampleAffine;
    throw ConfigError("unknown example case '" + which + "' (expected constant or affine)");
}

int run_reproduce(const std::string& which, const DriverOptions& options) {
    ExperimentConfig cfg = ExperimentConfig::parse(example_config_text(which));
    if (options.seed) cfg.simulation.seed = *options.seed;
    if (options.trials) cfg.simulation.trials = *options.trials;
    if (options.step) {
        cfg.simulation.h = *options.step;
        if (*options.step > 0.001)
            std::cerr << "warning: running with step " << *options.step
                      << " instead of the reference 0.001\n";
    }
    cfg.cross_validate();
    const fs::path dir = ensure_out_dir(options);

    // Certificate verification first.
    const CheckResult verdict = check_thm4(cfg.model, *cfg.thm4, cfg.family, cfg.rates);
    write_file((dir / "thm4_report.json").string(), to_json(verdict).dump(2) + "\n");
    std::cout << "reproduce[" << which << "]: certificate "
              << (verdict.pass ? "PASS" : "FAIL")
              << ", worst lambda_max = " << verdict.worst_lambda_max << "\n";

    // Decay run with the Lyapunov functional attached.
    const InitialSegment init = cfg.simulation.initial_segment();
    const LyapunovV1Spec v1 = LyapunovV1Spec::from(*cfg.thm4, cfg.nu);
    const McStats stats = mc_ensemble(cfg.model, cfg.family, cfg.rates, cfg.initial_mode,
                                      cfg.delay, init, cfg.nu, mc_options(cfg, options), &v1);

    std::ostringstream csv;
    stats.write_csv(csv);
    write_file((dir / "decay_curve.csv").string(), csv.str());

    const Classification classification = classify_stability(stats, cfg.nu, cfg.classification);
    json summary;
    summary["case"] = which;
    summary["certificate"] = to_json(verdict);
    summary["classification"] = to_json(classification);
    summary["supermartingale"] = to_json(supermartingale_check(stats, cfg.simulation.h));
    summary["final_mean_x2"] = stats.mean_x2.back();
    summary["diverged"] = stats.diverged;
    write_file((dir / "reproduce_summary.json").string(), summary.dump(2) + "\n");

    std::cout << "reproduce[" << which << "]: mean |x(" << cfg.simulation.horizon
              << ")|^2 = " << stats.mean_x2.back() << ", nu-weighted sup attained at t = "
              << classification.M_argmax_t << "\n";
    return verdict.pass ? 0 : 1;
}

int dispatch(int (*command)(const DriverOptions&), const DriverOptions& options) {
    try {
        return command(options);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace switchsde
