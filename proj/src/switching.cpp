#include "switchsde/switching.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace switchsde {

namespace {

constexpr double kRowSumTolerance = 1e-12;

void check_stochastic_rows(const Eigen::MatrixXd& m, const std::string& name) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) < 0.0)
                throw ConfigError(name + ": negative probability in row " + std::to_string(i));
            sum += m(i, j);
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw ConfigError(name + ": row " + std::to_string(i) + " sums to " +
                              std::to_string(sum) + ", expected 1");
    }
}

ModeId walk_mode(const WalkState& w) {
    return w.running_max == w.partial_sum ? 0 : 1;
}

}  // namespace

double RateMap::rate(ModeId mode) const {
    if (mode < 0 || static_cast<std::size_t>(mode) >= rates.size())
        throw ConfigError("rate map: unknown mode " + std::to_string(mode));
    return rates[static_cast<std::size_t>(mode)];
}

void RateMap::validate_for_sampling(int required_modes) const {
    if (static_cast<int>(rates.size()) < required_modes)
        throw ConfigError("rate map covers " + std::to_string(rates.size()) +
                          " modes, family needs " + std::to_string(required_modes));
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i] > 0.0))
            throw ConfigError("rate map: non-positive rate for mode " + std::to_string(i));
        if (rates[i] > mu0 * (1.0 + 1e-12))
            throw ConfigError("rate map: rate for mode " + std::to_string(i) +
                              " exceeds the bound mu0");
    }
}

int family_mode_count(const SwitchingFamily& family) {
    struct Visitor {
        int operator()(const IndependentIid& f) const { return static_cast<int>(f.dist.size()); }
        int operator()(const FiniteMarkov& f) const { return static_cast<int>(f.transition.rows()); }
        int operator()(const HiddenMarkov& f) const { return static_cast<int>(f.emission.cols()); }
        int operator()(const ReflectedMaxWalk&) const { return 2; }
        int operator()(const FixedSequence& f) const {
            ModeId max_mode = 0;
            for (ModeId m : f.modes) max_mode = std::max(max_mode, m);
            return max_mode + 1;
        }
    };
    return std::visit(Visitor{}, family);
}

void validate_family(const SwitchingFamily& family) {
    if (const auto* iid = std::get_if<IndependentIid>(&family)) {
        if (iid->dist.empty()) throw ConfigError("iid family: empty distribution");
        double sum = 0.0;
        for (double p : iid->dist) {
            if (p < 0.0) throw ConfigError("iid family: negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw ConfigError("iid family: distribution sums to " + std::to_string(sum));
    } else if (const auto* fm = std::get_if<FiniteMarkov>(&family)) {
        if (fm->transition.rows() != fm->transition.cols())
            throw ConfigError("markov family: transition matrix must be square");
        if (fm->transition.rows() == 0) throw ConfigError("markov family: empty transition matrix");
        check_stochastic_rows(fm->transition, "markov family");
    } else if (const auto* hm = std::get_if<HiddenMarkov>(&family)) {
        if (hm->hidden_transition.rows() != hm->hidden_transition.cols())
            throw ConfigError("hidden markov family: hidden transition must be square");
        if (hm->hidden_transition.rows() != hm->emission.rows())
            throw ConfigError("hidden markov family: emission rows must match hidden states");
        if (hm->emission.cols() == 0 || hm->emission.rows() == 0)
            throw ConfigError("hidden markov family: empty emission matrix");
        if (hm->initial_hidden < 0 || hm->initial_hidden >= hm->hidden_transition.rows())
            throw ConfigError("hidden markov family: initial hidden state out of range");
        check_stochastic_rows(hm->hidden_transition, "hidden markov transition");
        check_stochastic_rows(hm->emission, "hidden markov emission");
    } else if (const auto* fs = std::get_if<FixedSequence>(&family)) {
        if (fs->modes.empty()) throw ConfigError("fixed sequence family: empty mode list");
        for (ModeId m : fs->modes)
            if (m < 0) throw ConfigError("fixed sequence family: negative mode id");
    }
}

FamilyState initial_state(const SwitchingFamily& family, ModeId initial_mode) {
    validate_family(family);
    const int modes = family_mode_count(family);
    if (initial_mode < 0 || initial_mode >= modes)
        throw ConfigError("initial mode " + std::to_string(initial_mode) +
                          " outside the family's mode space");
    FamilyState state;
    state.current = initial_mode;
    if (const auto* hm = std::get_if<HiddenMarkov>(&family)) {
        state.hidden = hm->initial_hidden;
    } else if (std::holds_alternative<ReflectedMaxWalk>(family)) {
        // S = Y = 0 forces the walk to start on its maximum, i.e. mode 0.
        if (initial_mode != 0)
            throw ConfigError("reflected-max walk starts at S = Y = 0, so the initial mode must be 0");
    } else if (const auto* fs = std::get_if<FixedSequence>(&family)) {
        if (fs->modes.front() != initial_mode)
            throw ConfigError("fixed sequence family: initial mode must match the first element");
        state.position = 0;
    }
    return state;
}

ModeId next_mode(const SwitchingFamily& family, FamilyState& state, SplitRng& rng) {
    if (const auto* iid = std::get_if<IndependentIid>(&family)) {
        state.current = rng.categorical(iid->dist);
        return state.current;
    }
    if (const auto* fm = std::get_if<FiniteMarkov>(&family)) {
        const Eigen::Index k = fm->transition.cols();
        std::vector<double> row(static_cast<std::size_t>(k));
        for (Eigen::Index j = 0; j < k; ++j) row[static_cast<std::size_t>(j)] = fm->transition(state.current, j);
        state.current = rng.categorical(row);
        return state.current;
    }
    if (const auto* hm = std::get_if<HiddenMarkov>(&family)) {
        const Eigen::Index nh = hm->hidden_transition.cols();
        std::vector<double> row(static_cast<std::size_t>(nh));
        for (Eigen::Index j = 0; j < nh; ++j) row[static_cast<std::size_t>(j)] = hm->hidden_transition(state.hidden, j);
        state.hidden = rng.categorical(row);
        const Eigen::Index nm = hm->emission.cols();
        std::vector<double> em(static_cast<std::size_t>(nm));
        for (Eigen::Index j = 0; j < nm; ++j) em[static_cast<std::size_t>(j)] = hm->emission(state.hidden, j);
        state.current = rng.categorical(em);
        return state.current;
    }
    if (std::get_if<ReflectedMaxWalk>(&family) != nullptr) {
        const long long step = rng.uniform01() < 0.5 ? -1 : 1;
        state.walk.partial_sum += step;
        state.walk.running_max = std::max(state.walk.running_max, state.walk.partial_sum);
        state.current = walk_mode(state.walk);
        return state.current;
    }
    const auto& fs = std::get<FixedSequence>(family);
    if (state.position + 1 < fs.modes.size()) ++state.position;
    state.current = fs.modes[state.position];
    return state.current;
}

NextDistribution conditional_next_distribution(const SwitchingFamily& family,
                                               const FamilyState& state) {
    NextDistribution result;
    if (const auto* iid = std::get_if<IndependentIid>(&family)) {
        result.probs = iid->dist;
        return result;
    }
    if (const auto* fm = std::get_if<FiniteMarkov>(&family)) {
        const Eigen::Index k = fm->transition.cols();
        result.probs.resize(static_cast<std::size_t>(k));
        for (Eigen::Index j = 0; j < k; ++j)
            result.probs[static_cast<std::size_t>(j)] = fm->transition(state.current, j);
        return result;
    }
    if (const auto* hm = std::get_if<HiddenMarkov>(&family)) {
        // Marginalize over the hidden successor: sum_z' T(z, z') P(xi | z').
        const Eigen::RowVectorXd marginal =
            hm->hidden_transition.row(state.hidden) * hm->emission;
        result.probs.assign(marginal.data(), marginal.data() + marginal.size());
        return result;
    }
    if (std::get_if<ReflectedMaxWalk>(&family) != nullptr) {
        if (walk_mode(state.walk) == 0) {
            // On the maximum: X = +1 keeps Y' = S', X = -1 leaves it, each w.p. 1/2.
            result.probs = {0.5, 0.5};
        } else {
            result.bound_only = true;
        }
        return result;
    }
    const auto& fs = std::get<FixedSequence>(family);
    const std::size_t next =
        state.position + 1 < fs.modes.size() ? state.position + 1 : state.position;
    result.probs.assign(static_cast<std::size_t>(family_mode_count(family)), 0.0);
    result.probs[static_cast<std::size_t>(fs.modes[next])] = 1.0;
    return result;
}

ModeId SwitchingPath::mode_at(double t) const {
    if (!(t >= 0.0) || t > horizon)
        throw std::domain_error("mode_at: t = " + std::to_string(t) + " outside [0, horizon]");
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return modes[static_cast<std::size_t>(it - jump_times.begin())];
}

void SwitchingPath::write_table(std::ostream& os) const {
    os << "jump_time new_mode\n";
    char buf[64];
    for (std::size_t k = 0; k < jump_times.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", jump_times[k]);
        os << buf << ' ' << modes[k + 1] << '\n';
    }
}

SwitchingPath sample_path(const SwitchingFamily& family, const RateMap& rates,
                          ModeId initial_mode, double horizon, std::uint64_t seed) {
    return sample_path_stream(family, rates, initial_mode, horizon, seed, 0);
}

SwitchingPath sample_path_stream(const SwitchingFamily& family, const RateMap& rates,
                                 ModeId initial_mode, double horizon,
                                 std::uint64_t seed, std::uint64_t stream) {
    if (!(horizon >= 0.0)) throw ConfigError("sample_path: horizon must be non-negative");
    rates.validate_for_sampling(family_mode_count(family));
    FamilyState state = initial_state(family, initial_mode);
    SplitRng rng(seed, stream);

    SwitchingPath path;
    path.horizon = horizon;
    path.modes.push_back(initial_mode);

    const auto* fs = std::get_if<FixedSequence>(&family);
    double t = 0.0;
    while (true) {
        if (fs != nullptr && state.position + 1 >= fs->modes.size()) break;
        t += rng.exponential(rates.rate(state.current));
        if (t > horizon) break;
        const ModeId mode = next_mode(family, state, rng);
        path.jump_times.push_back(t);
        path.modes.push_back(mode);
    }
    return path;
}

}  // namespace switchsde
