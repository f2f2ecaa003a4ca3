#include "switchsde/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace switchsde {

namespace {

constexpr double kDivergenceGuard = 1e8;

// Shared interpolation kernel over a sorted time/state table.
Eigen::VectorXd interpolate(const std::vector<double>& times,
                            const std::vector<Eigen::VectorXd>& states, double t,
                            const InitialSegment* init, double tau_b) {
    if (!times.empty() && t >= times.front()) {
        if (t > times.back() + 1e-9 * std::max(1.0, std::abs(times.back())))
            throw std::domain_error("history lookup beyond the stored grid at t = " +
                                    std::to_string(t));
        const auto it = std::lower_bound(times.begin(), times.end(), t);
        const auto idx = static_cast<std::size_t>(it - times.begin());
        if (it != times.end() && *it == t) return states[idx];
        if (it == times.end()) return states.back();
        const std::size_t lo = idx - 1;
        const double span = times[idx] - times[lo];
        if (span <= 0.0) return states[idx];
        const double w = (t - times[lo]) / span;
        return states[lo] + w * (states[idx] - states[lo]);
    }
    if (init == nullptr)
        throw std::domain_error("history lookup before the stored grid with no initial segment");
    if (std::isfinite(tau_b) && t < -tau_b - 1e-9 * std::max(1.0, tau_b))
        throw std::domain_error("history lookup at t = " + std::to_string(t) +
                                " below -tau_b = " + std::to_string(-tau_b));
    return init->eval(std::isfinite(tau_b) ? std::max(t, -tau_b) : t);
}

}  // namespace

InitialSegment InitialSegment::constant(Eigen::VectorXd value) {
    if (value.size() == 0) throw ConfigError("initial segment: empty vector");
    InitialSegment seg;
    seg.constant_ = std::move(value);
    return seg;
}

InitialSegment InitialSegment::sampled(std::vector<double> times,
                                       std::vector<Eigen::VectorXd> values) {
    if (times.size() < 2 || times.size() != values.size())
        throw ConfigError("initial segment: need matching sample times and values (>= 2)");
    if (!std::is_sorted(times.begin(), times.end()))
        throw ConfigError("initial segment: sample times must be increasing");
    if (times.back() != 0.0)
        throw ConfigError("initial segment: last sample must sit at theta = 0");
    const Eigen::Index n = values.front().size();
    for (const auto& v : values)
        if (v.size() != n) throw ConfigError("initial segment: inconsistent dimensions");
    InitialSegment seg;
    seg.times_ = std::move(times);
    seg.values_ = std::move(values);
    return seg;
}

Eigen::VectorXd InitialSegment::eval(double theta) const {
    if (theta > 1e-12) throw std::domain_error("initial segment evaluated at positive time");
    if (times_.empty()) return constant_;
    if (theta <= times_.front()) {
        if (theta < times_.front() - 1e-9 * std::max(1.0, std::abs(times_.front())))
            throw std::domain_error("initial segment evaluated below its first sample");
        return values_.front();
    }
    return interpolate(times_, values_, theta, nullptr, 0.0);
}

int InitialSegment::dim() const {
    return times_.empty() ? static_cast<int>(constant_.size())
                          : static_cast<int>(values_.front().size());
}

GeneralSds GeneralSds::from(const SwitchedNetworkModel& model) {
    model.validate_shapes();
    GeneralSds sds;
    sds.n = model.n;
    sds.noise_width = model.noise.width();
    sds.drift = [&model](const Eigen::VectorXd& x, const Eigen::VectorXd& xdel, ModeId mode,
                         double) { return model.drift(x, xdel, mode); };
    sds.diffusion = [&model](const Eigen::VectorXd& x, const Eigen::VectorXd& xdel, ModeId mode,
                             double) { return model.sigma(x, xdel, mode); };
    return sds;
}

History::History(const InitialSegment* init, double tau_b) : init_(init), tau_b_(tau_b) {}

void History::append(double t, const Eigen::VectorXd& x) {
    if (!times_.empty() && t <= times_.back())
        throw std::logic_error("history: appended times must increase");
    times_.push_back(t);
    states_.push_back(x);
}

Eigen::VectorXd History::at(double t) const {
    return interpolate(times_, states_, t, init_, tau_b_);
}

Eigen::VectorXd Trajectory::state_at(double t, const InitialSegment* init, double tau_b) const {
    return interpolate(times, states, t, init, tau_b);
}

std::size_t Trajectory::index_of(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || std::abs(*it - t) > 1e-12 * std::max(1.0, std::abs(t)))
        throw std::domain_error("time " + std::to_string(t) + " is not on the trajectory grid");
    return static_cast<std::size_t>(it - times.begin());
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t,mode";
    for (Eigen::Index i = 0; i < (states.empty() ? 0 : states.front().size()); ++i)
        os << ",x" << (i + 1);
    os << '\n';
    char buf[64];
    for (std::size_t j = 0; j < times.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", times[j]);
        os << buf << ',' << modes[j];
        for (Eigen::Index i = 0; i < states[j].size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", states[j](i));
            os << ',' << buf;
        }
        os << '\n';
    }
}

std::vector<double> refined_grid(double h, double horizon, const SwitchingPath& path) {
    std::vector<double> grid;
    const auto steps = static_cast<long long>(std::ceil(horizon / h - 1e-9));
    grid.reserve(static_cast<std::size_t>(steps) + path.jump_times.size() + 2);
    for (long long j = 0; j <= steps; ++j) grid.push_back(std::min(h * static_cast<double>(j), horizon));
    if (grid.back() < horizon) grid.push_back(horizon);

    for (double s : path.jump_times) {
        if (s <= 0.0 || s > horizon) continue;
        const auto it = std::lower_bound(grid.begin(), grid.end(), s);
        if (it != grid.end() && *it == s) continue;  // already a grid point
        grid.insert(it, s);
    }
    return grid;
}

Trajectory integrate_stream(const GeneralSds& sds, const SwitchingPath& path,
                            const DelayFunction& delay, const InitialSegment& init, double h,
                            double horizon, std::uint64_t seed, std::uint64_t stream) {
    if (!(h > 0.0)) throw ConfigError("integrate: step size must be positive");
    if (!(horizon >= 0.0)) throw ConfigError("integrate: horizon must be non-negative");
    if (horizon > path.horizon + 1e-12 * std::max(1.0, path.horizon))
        throw ConfigError("integrate: horizon exceeds the switching path horizon");
    if (init.dim() != sds.n) throw ConfigError("integrate: initial segment dimension mismatch");
    if (!sds.drift || !sds.diffusion) throw ConfigError("integrate: drift/diffusion not set");

    const double tau_b = delay.tau_b();
    if (!std::isfinite(tau_b) && !init.is_constant())
        throw ConfigError("integrate: unbounded tau_b needs a constant initial segment");

    const std::vector<double> grid = refined_grid(h, horizon, path);
    SplitRng rng(seed, stream);

    Trajectory traj;
    traj.seed = seed;
    traj.times = grid;
    traj.states.reserve(grid.size());
    traj.modes.reserve(grid.size());

    History history(&init, tau_b);
    Eigen::VectorXd x = init.eval(0.0);
    history.append(0.0, x);
    traj.states.push_back(x);
    traj.modes.push_back(path.mode_at(0.0));

    Eigen::VectorXd dw(sds.noise_width);
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        const double t = grid[j];
        const double dt = grid[j + 1] - t;
        const ModeId mode = path.mode_at(t);

        const double lag = t - delay.tau(t);
        if (std::isfinite(tau_b) && lag < -tau_b - 1e-9 * std::max(1.0, tau_b))
            throw ConfigError("integrate: delayed argument " + std::to_string(lag) +
                              " falls below -tau_b");
        const Eigen::VectorXd xdel = history.at(lag);

        const Eigen::VectorXd f = sds.drift(x, xdel, mode, t);
        const Eigen::MatrixXd sig = sds.diffusion(x, xdel, mode, t);
        const double sqrt_dt = std::sqrt(dt);
        for (int i = 0; i < sds.noise_width; ++i) dw(i) = sqrt_dt * rng.normal();

        x = x + dt * f + sig * dw;
        const double amplitude = x.cwiseAbs().maxCoeff();
        if (!std::isfinite(amplitude) || amplitude > kDivergenceGuard)
            throw DivergenceError("integration diverged at t = " + std::to_string(grid[j + 1]),
                                  grid[j + 1]);

        history.append(grid[j + 1], x);
        traj.states.push_back(x);
        traj.modes.push_back(path.mode_at(grid[j + 1]));
    }
    return traj;
}

Trajectory integrate(const GeneralSds& sds, const SwitchingPath& path, const DelayFunction& delay,
                     const InitialSegment& init, double h, double horizon, std::uint64_t seed) {
    return integrate_stream(sds, path, delay, init, h, horizon, seed, 1);
}

Trajectory integrate(const SwitchedNetworkModel& model, const SwitchingPath& path,
                     const DelayFunction& delay, const InitialSegment& init, double h,
                     double horizon, std::uint64_t seed) {
    return integrate(GeneralSds::from(model), path, delay, init, h, horizon, seed);
}

}  // namespace switchsde
