#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "switchsde/integrator.hpp"
#include "switchsde/lyapunov.hpp"
#include "switchsde/nu.hpp"

namespace switchsde {

struct McOptions {
    double h = 0.01;
    double horizon = 1.0;
    int trials = 2;
    std::uint64_t seed = 0;
    std::vector<double> epsilons;
    int threads = 0;  // 0: SWITCHSDE_THREADS env var, then hardware concurrency
};

/// Ensemble statistics on the uniform time grid. Means and standard errors
/// cover the non-diverged trials; exceedance[e][j] estimates P(|x(t_j)| > eps_e).
struct McStats {
    std::vector<double> times;
    std::vector<double> mean_x2, se_x2, nu_mean_x2;
    std::vector<double> mean_V, se_V;
    std::vector<std::vector<double>> exceedance;
    std::vector<double> epsilons;
    int trials = 0;
    int diverged = 0;
    bool has_V = false;

    void write_csv(std::ostream& os) const;
};

/// Runs `trials` independent (path, trajectory) pairs, each on its own RNG
/// substream, and aggregates |x|^2, nu |x|^2, exceedance frequencies and,
/// when a V1 spec is supplied, the Lyapunov functional. Aggregation is an
/// ordered compensated reduction, so results do not depend on thread count.
McStats mc_ensemble(const SwitchedNetworkModel& model, const SwitchingFamily& family,
                    const RateMap& rates, ModeId initial_mode, const DelayFunction& delay,
                    const InitialSegment& init, const NuFunction& nu, const McOptions& options,
                    const LyapunovV1Spec* v1 = nullptr);

struct SupermartingaleReport {
    double worst_violation = 0.0;  // positive: E[V] rose beyond the allowance
    double worst_from = 0.0, worst_to = 0.0;
    double slack = 0.0;
    bool pass = false;
};

/// Checks that the empirical E[V1(t)] never increases by more than three
/// standard errors plus an O(h) discretization slack, over every grid pair.
SupermartingaleReport supermartingale_check(const McStats& stats, double h);

struct DynkinReport {
    double residual = 0.0;    // mean of V(T) - V(0) - \int AV dt over trials
    double se = 0.0;          // standard error of that mean
    double allowance = 0.0;   // 3 se + C sqrt(h) scale
    int trials = 0;
    bool pass = false;
};

/// Monte Carlo test of the generalized Dynkin identity
/// E[V(T)] - V(0) = E[\int_0^T AV dt]. The time integral is trapezoidal in
/// the continuous arguments with the step's mode held fixed, which makes the
/// pure-jump case exact. Requires an exact conditional jump law; a trial
/// that hits a bound-only chi class aborts with ConfigError.
DynkinReport dynkin_residual(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
                             const SwitchingFamily& family, const RateMap& rates,
                             ModeId initial_mode, const DelayFunction& delay,
                             const InitialSegment& init, double h, double horizon, int trials,
                             std::uint64_t seed);

struct ClassificationOptions {
    double mean_square_threshold = 1e-2;
    double exceedance_level = 0.05;
};

struct Classification {
    bool mean_square = false;
    bool nu_mean_square = false;
    std::vector<bool> in_probability;  // one verdict per epsilon
    double M_estimate = 0.0;           // sup_t nu(t) mean|x(t)|^2
    double M_argmax_t = 0.0;
    std::vector<std::string> diagnostics;
};

/// Advisory finite-horizon classification against the stability definitions:
/// mean-square (tail below threshold and trending down), nu-mean-square
/// (sup nu E|x|^2 attained in the first half), in-probability (final
/// exceedance below the configured level with a 3-sigma margin).
Classification classify_stability(const McStats& stats, const NuFunction& nu,
                                  const ClassificationOptions& options = {});

}  // namespace switchsde
