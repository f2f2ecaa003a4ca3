#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "switchsde/errors.hpp"
#include "switchsde/rng.hpp"

namespace switchsde {

/// Index into the finite, enumerated mode space.
using ModeId = int;

/// Per-mode event rates mu(xi) of the Cox process, plus the global bound mu0.
/// Zero rates are representable (a mode that never fires) but rejected by
/// sample_path, which requires strictly positive rates.
struct RateMap {
    std::vector<double> rates;
    double mu0 = 0.0;

    double rate(ModeId mode) const;
    void validate_for_sampling(int required_modes) const;
};

// ---------------------------------------------------------------------------
// Switching families: the conditional law of the discrete adapted process.
// ---------------------------------------------------------------------------

/// xi^{k+1} drawn i.i.d. from a fixed distribution over modes.
struct IndependentIid {
    std::vector<double> dist;
};

/// xi^{k+1} drawn from the transition row of the current mode.
struct FiniteMarkov {
    Eigen::MatrixXd transition;  // row-stochastic, square
};

/// Hidden chain zeta on Omega_1; each hidden state emits a mode.
struct HiddenMarkov {
    Eigen::MatrixXd hidden_transition;  // |Omega_1| x |Omega_1|, row-stochastic
    Eigen::MatrixXd emission;           // |Omega_1| x mode_count, row-stochastic
    int initial_hidden = 0;
};

/// The non-Markovian example: a +-1 random walk S_k with running maximum Y_k;
/// mode 0 while the maximum is attained (Y_k = S_k), mode 1 otherwise.
struct ReflectedMaxWalk {};

/// Testing hook: a scripted mode sequence; jumping stops once it is exhausted.
struct FixedSequence {
    std::vector<ModeId> modes;
};

using SwitchingFamily =
    std::variant<IndependentIid, FiniteMarkov, HiddenMarkov, ReflectedMaxWalk, FixedSequence>;

int family_mode_count(const SwitchingFamily& family);

/// Checks probability rows sum to 1 within 1e-12, entries non-negative,
/// square transition matrices. Throws ConfigError on violation.
void validate_family(const SwitchingFamily& family);

// ---------------------------------------------------------------------------
// Family evolution state.
// ---------------------------------------------------------------------------

struct WalkState {
    long long partial_sum = 0;
    long long running_max = 0;
};

/// Internal history state consumed by next_mode and
/// conditional_next_distribution. Only the member relevant to the
/// family variant is meaningful.
struct FamilyState {
    ModeId current = 0;
    int hidden = 0;             // HiddenMarkov
    WalkState walk;             // ReflectedMaxWalk
    std::size_t position = 0;   // FixedSequence: index of the active element
};

FamilyState initial_state(const SwitchingFamily& family, ModeId initial_mode);

/// Draws xi^{k+1} given the full internal history state and advances it.
ModeId next_mode(const SwitchingFamily& family, FamilyState& state, SplitRng& rng);

/// Conditional law of xi^{k+1} given the state. Either an exact probability
/// vector over modes, or bound_only = true when only the conservative
/// certificate bound is available (reflected-max walk off the maximum).
struct NextDistribution {
    std::vector<double> probs;
    bool bound_only = false;
};

NextDistribution conditional_next_distribution(const SwitchingFamily& family,
                                               const FamilyState& state);

// ---------------------------------------------------------------------------
// Realized switching path.
// ---------------------------------------------------------------------------

/// Right-continuous mode signal. modes[0] is active on [0, jump_times[0]),
/// modes[k] on [jump_times[k-1], jump_times[k]), and the last mode up to the
/// horizon. A jump exactly at the horizon is kept.
struct SwitchingPath {
    std::vector<double> jump_times;  // strictly increasing, in (0, horizon]
    std::vector<ModeId> modes;       // jump_times.size() + 1 entries
    double horizon = 0.0;

    /// Right-continuous lookup; at a jump instant returns the post-jump mode.
    ModeId mode_at(double t) const;

    std::size_t jump_count() const { return jump_times.size(); }

    /// Two-column text table (jump_time, new_mode) with a header row.
    void write_table(std::ostream& os) const;
};

/// Samples the Cox event times (exponential sojourns at the active mode's
/// rate) together with the discrete adapted mode sequence. Deterministic
/// given (family, rates, initial_mode, horizon, seed).
SwitchingPath sample_path(const SwitchingFamily& family, const RateMap& rates,
                          ModeId initial_mode, double horizon, std::uint64_t seed);

/// Same, on an explicit substream; used by ensemble drivers to give every
/// trial its own decorrelated stream.
SwitchingPath sample_path_stream(const SwitchingFamily& family, const RateMap& rates,
                                 ModeId initial_mode, double horizon,
                                 std::uint64_t seed, std::uint64_t stream);

}  // namespace switchsde
