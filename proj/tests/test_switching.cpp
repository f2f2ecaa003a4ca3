#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "switchsde/certificates.hpp"
#include "switchsde/switching.hpp"

using namespace switchsde;

namespace {

RateMap flat_rates(int modes, double rate) {
    RateMap rm;
    rm.rates.assign(static_cast<std::size_t>(modes), rate);
    rm.mu0 = rate;
    return rm;
}

}  // namespace

TEST_CASE("zero horizon gives an empty jump set") {
    const SwitchingFamily family = FixedSequence{{0, 1}};
    const SwitchingPath path = sample_path(family, flat_rates(2, 1.0), 0, 0.0, 7);
    CHECK(path.jump_times.empty());
    REQUIRE(path.modes.size() == 1);
    CHECK(path.modes[0] == 0);
}

TEST_CASE("paths are deterministic given the seed") {
    const SwitchingFamily family = ReflectedMaxWalk{};
    RateMap rates;
    rates.rates = {50.0, 1.0};
    rates.mu0 = 50.0;
    const SwitchingPath a = sample_path(family, rates, 0, 25.0, 42);
    const SwitchingPath b = sample_path(family, rates, 0, 25.0, 42);
    REQUIRE(a.jump_times.size() == b.jump_times.size());
    for (std::size_t k = 0; k < a.jump_times.size(); ++k) {
        CHECK(a.jump_times[k] == b.jump_times[k]);  // bit-for-bit
        CHECK(a.modes[k] == b.modes[k]);
    }
    const SwitchingPath c = sample_path(family, rates, 0, 25.0, 43);
    CHECK(a.jump_times != c.jump_times);
}

TEST_CASE("counting law at constant rate: mean and variance of the jump count") {
    // Poisson(mu T) oracle over exponential inter-arrivals.
    const double mu = 5.0, horizon = 10.0;
    const int paths = 10000;
    const SwitchingFamily family = IndependentIid{{0.5, 0.5}};
    const RateMap rates = flat_rates(2, mu);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < paths; ++i) {
        const auto count =
            static_cast<double>(sample_path(family, rates, 0, horizon, 1000 + i).jump_count());
        sum += count;
        sum2 += count * count;
    }
    const double mean = sum / paths;
    const double var = sum2 / paths - mean * mean;
    const double expected = mu * horizon;
    CHECK(std::abs(mean - expected) < 3.0 * std::sqrt(expected / paths));
    CHECK(std::abs(var - expected) < 0.2 * expected);
}

TEST_CASE("sojourn means match the exponential law for mu(0)=50, mu(1)=1") {
    const SwitchingFamily family = ReflectedMaxWalk{};
    RateMap rates;
    rates.rates = {50.0, 1.0};
    rates.mu0 = 50.0;

    double sojourn0 = 0.0, sojourn1 = 0.0;
    int count0 = 0, count1 = 0;
    for (int i = 0; i < 1000 && (count0 < 10000 || count1 < 10000); ++i) {
        const SwitchingPath path = sample_path(family, rates, 0, 200.0, 5000 + i);
        double prev = 0.0;
        for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
            const ModeId mode = path.modes[k];
            const double sojourn = path.jump_times[k] - prev;
            prev = path.jump_times[k];
            if (mode == 0) {
                sojourn0 += sojourn;
                ++count0;
            } else {
                sojourn1 += sojourn;
                ++count1;
            }
        }
    }
    REQUIRE(count0 >= 10000);
    REQUIRE(count1 >= 10000);
    const double mean0 = sojourn0 / count0;
    const double mean1 = sojourn1 / count1;
    // 3-sigma bands around 1/50 and 1 (exponential: sd = mean).
    CHECK(std::abs(mean0 - 0.02) < 3.0 * 0.02 / std::sqrt(static_cast<double>(count0)));
    CHECK(std::abs(mean1 - 1.0) < 3.0 * 1.0 / std::sqrt(static_cast<double>(count1)));
}

TEST_CASE("mode_at: right-continuous lookup") {
    SwitchingPath path;
    path.jump_times = {2.0};
    path.modes = {0, 1};
    path.horizon = 4.0;
    CHECK(path.mode_at(1.9) == 0);
    CHECK(path.mode_at(2.0) == 1);  // post-jump at the instant
    CHECK(path.mode_at(4.0) == 1);
    CHECK_THROWS_AS(path.mode_at(4.1), std::domain_error);
    CHECK_THROWS_AS(path.mode_at(-0.1), std::domain_error);

    SwitchingPath flat;
    flat.modes = {3};
    flat.horizon = 1.0;
    CHECK(flat.mode_at(0.7) == 3);
}

TEST_CASE("mode_at agrees with a linear scan oracle") {
    const SwitchingFamily family = IndependentIid{{0.2, 0.3, 0.5}};
    const RateMap rates = flat_rates(3, 2.0);
    SplitRng rng(99, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const SwitchingPath path = sample_path(family, rates, 1, 20.0, 300 + trial);
        for (int q = 0; q < 200; ++q) {
            const double t = 20.0 * rng.uniform01();
            // Linear scan: last jump time <= t decides the interval.
            std::size_t idx = 0;
            while (idx < path.jump_times.size() && path.jump_times[idx] <= t) ++idx;
            CHECK(path.mode_at(t) == path.modes[idx]);
        }
    }
}

TEST_CASE("reflected-max walk: forced transitions") {
    const SwitchingFamily family = ReflectedMaxWalk{};
    bool saw_down_from_max = false, saw_up_from_max = false, saw_up_from_below = false;

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitRng probe(seed, 0);
        const bool down = probe.uniform01() < 0.5;

        // From the maximum (mode 0): X = -1 forces mode 1, X = +1 keeps mode 0.
        SplitRng rng(seed, 0);
        FamilyState from_max = initial_state(family, 0);
        const ModeId next = next_mode(family, from_max, rng);
        if (down) {
            CHECK(next == 1);
            CHECK(from_max.walk.partial_sum == -1);
            CHECK(from_max.walk.running_max == 0);
            saw_down_from_max = true;
        } else {
            CHECK(next == 0);
            saw_up_from_max = true;
        }

        // From S = Y - 1 (mode 1): X = +1 re-attains the maximum.
        SplitRng rng2(seed, 0);
        FamilyState below;
        below.current = 1;
        below.walk.partial_sum = -1;
        below.walk.running_max = 0;
        const ModeId next_below = next_mode(family, below, rng2);
        if (down) {
            CHECK(next_below == 1);
        } else {
            CHECK(next_below == 0);
            saw_up_from_below = true;
        }
    }
    CHECK(saw_down_from_max);
    CHECK(saw_up_from_max);
    CHECK(saw_up_from_below);
}

TEST_CASE("finite Markov identity matrix is absorbing") {
    const SwitchingFamily family = FiniteMarkov{Eigen::MatrixXd::Identity(3, 3)};
    FamilyState state = initial_state(family, 2);
    SplitRng rng(5, 0);
    for (int k = 0; k < 50; ++k) CHECK(next_mode(family, state, rng) == 2);
}

TEST_CASE("conditional next distribution: exact cases and the bound marker") {
    SUBCASE("iid returns its fixed distribution") {
        const SwitchingFamily family = IndependentIid{{0.3, 0.7}};
        const FamilyState state = initial_state(family, 1);
        const NextDistribution d = conditional_next_distribution(family, state);
        REQUIRE(!d.bound_only);
        CHECK(d.probs == std::vector<double>{0.3, 0.7});
    }
    SUBCASE("walk on the maximum is exactly half-half") {
        const SwitchingFamily family = ReflectedMaxWalk{};
        const FamilyState state = initial_state(family, 0);
        const NextDistribution d = conditional_next_distribution(family, state);
        REQUIRE(!d.bound_only);
        CHECK(d.probs == std::vector<double>{0.5, 0.5});
    }
    SUBCASE("walk off the maximum only admits the bound") {
        const SwitchingFamily family = ReflectedMaxWalk{};
        FamilyState state;
        state.current = 1;
        state.walk.partial_sum = -2;
        state.walk.running_max = 1;
        CHECK(conditional_next_distribution(family, state).bound_only);
    }
    SUBCASE("hidden Markov marginalization against the matrix-vector oracle") {
        HiddenMarkov hm;
        hm.hidden_transition = Eigen::MatrixXd::Identity(2, 2);
        hm.emission.resize(2, 2);
        hm.emission << 1.0, 0.0, 0.0, 1.0;
        hm.initial_hidden = 0;
        const SwitchingFamily family = hm;
        const FamilyState state = initial_state(family, 0);
        const NextDistribution d = conditional_next_distribution(family, state);
        CHECK(d.probs == std::vector<double>{1.0, 0.0});

        // Generic chain: probs = T.row(hidden) * emission, oracle by hand.
        HiddenMarkov generic;
        generic.hidden_transition.resize(2, 2);
        generic.hidden_transition << 0.25, 0.75, 0.6, 0.4;
        generic.emission.resize(2, 3);
        generic.emission << 0.5, 0.25, 0.25, 0.1, 0.2, 0.7;
        generic.initial_hidden = 1;
        const SwitchingFamily gf = generic;
        FamilyState gs = initial_state(gf, 2);
        const NextDistribution gd = conditional_next_distribution(gf, gs);
        REQUIRE(gd.probs.size() == 3);
        for (int j = 0; j < 3; ++j) {
            double expected = 0.0;
            for (int z = 0; z < 2; ++z)
                expected += generic.hidden_transition(1, z) * generic.emission(z, j);
            CHECK(gd.probs[static_cast<std::size_t>(j)] == doctest::Approx(expected).epsilon(1e-15));
        }
    }
}

TEST_CASE("walk statistics: exits from mode 0 are half-half, mode 1 holds at least half") {
    const SwitchingFamily family = ReflectedMaxWalk{};

    // Mode-0 exits: a run of the walk visits the maximum only ~sqrt(k)
    // times, so draw 1e5 independent single steps from the at-max state
    // (the conditional law out of mode 0 depends on nothing else).
    const int steps = 100000;
    long long stayed = 0;
    for (int k = 0; k < steps; ++k) {
        FamilyState at_max = initial_state(family, 0);
        SplitRng rng(777, static_cast<std::uint64_t>(k));
        stayed += next_mode(family, at_max, rng) == 0 ? 1 : 0;
    }
    const double f00 = static_cast<double>(stayed) / steps;
    const double sigma0 = 0.5 / std::sqrt(static_cast<double>(steps));
    CHECK(std::abs(f00 - 0.5) < 3.0 * sigma0);

    // The exact conditional law out of mode 0 matches the empirical rates.
    const NextDistribution d = conditional_next_distribution(family, initial_state(family, 0));
    REQUIRE(!d.bound_only);
    CHECK(std::abs(d.probs[0] - f00) < 3.0 * sigma0);

    // Mode-1 holding frequency along one long run: the paper's one-sided bound.
    FamilyState state = initial_state(family, 0);
    SplitRng rng(2024, 0);
    long long from1_to1 = 0, from1 = 0;
    for (int k = 0; k < steps; ++k) {
        const ModeId before = state.current;
        const ModeId after = next_mode(family, state, rng);
        if (before == 1) {
            ++from1;
            from1_to1 += after == 1 ? 1 : 0;
        }
    }
    REQUIRE(from1 > 1000);
    const double f11 = static_cast<double>(from1_to1) / static_cast<double>(from1);
    CHECK(f11 >= 0.5 - 3.0 * 0.5 / std::sqrt(static_cast<double>(from1)));
}

TEST_CASE("configuration errors: unknown modes and non-positive rates") {
    const SwitchingFamily family = IndependentIid{{0.5, 0.5}};
    RateMap missing;
    missing.rates = {1.0};
    missing.mu0 = 1.0;
    CHECK_THROWS_AS(sample_path(family, missing, 0, 1.0, 0), ConfigError);

    RateMap zero;
    zero.rates = {1.0, 0.0};
    zero.mu0 = 1.0;
    CHECK_THROWS_AS(sample_path(family, zero, 0, 1.0, 0), ConfigError);

    RateMap above_mu0;
    above_mu0.rates = {2.0, 1.0};
    above_mu0.mu0 = 1.5;
    CHECK_THROWS_AS(sample_path(family, above_mu0, 0, 1.0, 0), ConfigError);

    const SwitchingFamily bad = IndependentIid{{0.5, 0.6}};
    CHECK_THROWS_AS(sample_path(bad, flat_rates(2, 1.0), 0, 1.0, 0), ConfigError);
}

TEST_CASE("jump exactly at the horizon is kept") {
    SwitchingPath path;
    path.jump_times = {1.0};
    path.modes = {0, 1};
    path.horizon = 1.0;
    CHECK(path.mode_at(1.0) == 1);
}
