#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "switchsde/certificates.hpp"
#include "switchsde/delay.hpp"
#include "switchsde/ensemble.hpp"
#include "switchsde/halanay.hpp"
#include "switchsde/integrator.hpp"
#include "switchsde/model.hpp"
#include "switchsde/nu.hpp"
#include "switchsde/switching.hpp"

namespace switchsde {

struct SimulationConfig {
    double h = 0.01;
    double horizon = 1.0;
    int trials = 2;
    std::uint64_t seed = 0;
    std::vector<double> epsilons;
    // Constant initial segment unless samples are given.
    Eigen::VectorXd initial;
    std::vector<double> initial_times;
    std::vector<Eigen::VectorXd> initial_values;

    InitialSegment initial_segment() const;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json"};
};

/// One declarative experiment: model + switching + delay + nu, optional
/// certificates and Halanay problem, simulation and output settings.
/// Parsing rejects unknown keys; serialization round-trips exactly.
struct ExperimentConfig {
    SwitchedNetworkModel model;
    SwitchingFamily family = IndependentIid{{1.0}};
    RateMap rates;
    ModeId initial_mode = 0;
    DelayFunction delay = DelayFunction::constant(1.0);
    NuFunction nu = NuFunction::exponential(0.01);
    std::optional<CertificateThm4> thm4;
    std::optional<CertificateThm5> thm5;
    std::optional<HalanayProblem> halanay;
    SimulationConfig simulation;
    ClassificationOptions classification;
    OutputConfig output;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& text);
    nlohmann::json to_json() const;

    /// Cross-section consistency: dimensions, mode counts, emission support
    /// of the initial pair, certificate constants filled from nu when absent.
    void cross_validate();
};

}  // namespace switchsde
