#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace switchsde {

/// Options shared by every subcommand; overrides win over the config file.
struct DriverOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    std::optional<int> trials;
    int threads = 0;
    bool dump_pi = false;
};

// Exit codes: 0 pass, 1 verdict failure, 2 configuration error. The run_*
// functions return 0/1 and throw ConfigError for code 2; dispatch() maps
// exceptions onto the contract and prints them to stderr.
int run_simulate(const DriverOptions& options);
int run_mc(const DriverOptions& options);
int run_verify_thm4(const DriverOptions& options);
int run_verify_thm5(const DriverOptions& options);
int run_halanay(const DriverOptions& options);
int run_validate(const DriverOptions& options);

/// Reproduces the bundled two-subsystem example end to end:
/// certificate verification, then the Monte Carlo decay run.
/// `which` is "constant" or "affine".
int run_reproduce(const std::string& which, const DriverOptions& options);

/// The bundled example configurations (also shipped under configs/).
std::string example_config_text(const std::string& which);

int dispatch(int (*command)(const DriverOptions&), const DriverOptions& options);

}  // namespace switchsde
