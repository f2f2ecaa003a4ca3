#include "switchsde/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

namespace switchsde {

namespace {

/// Neumaier-compensated accumulator: the reduction is associativity-safe,
/// so reordering trials cannot move the aggregate.
class CompensatedSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SWITCHSDE_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> uniform_grid(double h, double horizon) {
    std::vector<double> grid;
    const auto steps = static_cast<long long>(std::ceil(horizon / h - 1e-9));
    grid.reserve(static_cast<std::size_t>(steps) + 2);
    for (long long j = 0; j <= steps; ++j)
        grid.push_back(std::min(h * static_cast<double>(j), horizon));
    if (grid.back() < horizon) grid.push_back(horizon);
    return grid;
}

struct TrialSeries {
    bool diverged = false;
    std::vector<double> x2;                 // |x(t)|^2 on the uniform grid
    std::vector<double> v;                  // V1 when requested
    std::vector<std::vector<std::uint8_t>> exceed;  // per epsilon
};

}  // namespace

void McStats::write_csv(std::ostream& os) const {
    os << "t,mean_x2,se_x2,nu_mean_x2";
    if (has_V) os << ",mean_V,se_V";
    char name[64];
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        std::snprintf(name, sizeof(name), ",exceed_eps%zu", e + 1);
        os << name;
    }
    os << '\n';
    char buf[64];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf;
    };
    for (std::size_t j = 0; j < times.size(); ++j) {
        put(times[j]);
        os << ',';
        put(mean_x2[j]);
        os << ',';
        put(se_x2[j]);
        os << ',';
        put(nu_mean_x2[j]);
        if (has_V) {
            os << ',';
            put(mean_V[j]);
            os << ',';
            put(se_V[j]);
        }
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            os << ',';
            put(exceedance[e][j]);
        }
        os << '\n';
    }
}

McStats mc_ensemble(const SwitchedNetworkModel& model, const SwitchingFamily& family,
                    const RateMap& rates, ModeId initial_mode, const DelayFunction& delay,
                    const InitialSegment& init, const NuFunction& nu, const McOptions& options,
                    const LyapunovV1Spec* v1) {
    if (options.trials < 2) throw ConfigError("mc_ensemble: trials must be >= 2");
    if (!(options.h > 0.0)) throw ConfigError("mc_ensemble: step size must be positive");
    if (!(options.horizon > 0.0)) throw ConfigError("mc_ensemble: horizon must be positive");
    model.validate_shapes();

    const std::vector<double> grid = uniform_grid(options.h, options.horizon);
    const std::size_t points = grid.size();
    const auto trials = static_cast<std::size_t>(options.trials);
    const GeneralSds sds = GeneralSds::from(model);

    std::vector<TrialSeries> series(trials);
    const auto run_trial = [&](std::size_t i) {
        TrialSeries& out = series[i];
        out.x2.assign(points, 0.0);
        if (v1 != nullptr) out.v.assign(points, 0.0);
        out.exceed.assign(options.epsilons.size(), std::vector<std::uint8_t>(points, 0));
        try {
            const SwitchingPath path = sample_path_stream(family, rates, initial_mode,
                                                          options.horizon, options.seed, 2 * i);
            const Trajectory traj = integrate_stream(sds, path, delay, init, options.h,
                                                     options.horizon, options.seed, 2 * i + 1);
            std::optional<V1Evaluator> evaluator;
            if (v1 != nullptr) evaluator.emplace(*v1, model, delay, traj, init);

            // The refined trajectory grid contains every uniform point.
            std::size_t cursor = 0;
            for (std::size_t j = 0; j < points; ++j) {
                while (cursor < traj.times.size() && traj.times[cursor] < grid[j]) ++cursor;
                if (cursor >= traj.times.size() || traj.times[cursor] != grid[j])
                    throw std::logic_error("uniform grid point missing from trajectory");
                const double norm2 = traj.states[cursor].squaredNorm();
                out.x2[j] = norm2;
                if (evaluator) out.v[j] = evaluator->at_index(cursor);
                const double norm = std::sqrt(norm2);
                for (std::size_t e = 0; e < options.epsilons.size(); ++e)
                    out.exceed[e][j] = norm > options.epsilons[e] ? 1 : 0;
            }
        } catch (const DivergenceError&) {
            out.diverged = true;
        }
    };

    const int threads = std::min<int>(resolve_threads(options.threads), options.trials);
    if (threads <= 1) {
        for (std::size_t i = 0; i < trials; ++i) run_trial(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1))
                    run_trial(i);
            });
        for (auto& worker : pool) worker.join();
    }

    McStats stats;
    stats.times = grid;
    stats.epsilons = options.epsilons;
    stats.trials = options.trials;
    stats.has_V = v1 != nullptr;
    stats.mean_x2.assign(points, 0.0);
    stats.se_x2.assign(points, 0.0);
    stats.nu_mean_x2.assign(points, 0.0);
    if (stats.has_V) {
        stats.mean_V.assign(points, 0.0);
        stats.se_V.assign(points, 0.0);
    }
    stats.exceedance.assign(options.epsilons.size(), std::vector<double>(points, 0.0));

    for (const TrialSeries& s : series)
        if (s.diverged) ++stats.diverged;
    const int live = options.trials - stats.diverged;
    if (live < 1) throw ConfigError("mc_ensemble: every trial diverged");
    const double n = static_cast<double>(live);

    for (std::size_t j = 0; j < points; ++j) {
        CompensatedSum sum_x2, sum_v;
        for (const TrialSeries& s : series) {
            if (s.diverged) continue;
            sum_x2.add(s.x2[j]);
            if (stats.has_V) sum_v.add(s.v[j]);
        }
        const double mean_x2 = sum_x2.value() / n;
        stats.mean_x2[j] = mean_x2;
        stats.nu_mean_x2[j] = nu.value(grid[j]) * mean_x2;
        const double mean_v = stats.has_V ? sum_v.value() / n : 0.0;
        if (stats.has_V) stats.mean_V[j] = mean_v;

        if (live > 1) {
            CompensatedSum var_x2, var_v;
            for (const TrialSeries& s : series) {
                if (s.diverged) continue;
                var_x2.add((s.x2[j] - mean_x2) * (s.x2[j] - mean_x2));
                if (stats.has_V) var_v.add((s.v[j] - mean_v) * (s.v[j] - mean_v));
            }
            stats.se_x2[j] = std::sqrt(var_x2.value() / (n - 1.0) / n);
            if (stats.has_V) stats.se_V[j] = std::sqrt(var_v.value() / (n - 1.0) / n);
        }
        for (std::size_t e = 0; e < options.epsilons.size(); ++e) {
            CompensatedSum count;
            for (const TrialSeries& s : series) {
                if (s.diverged) continue;
                count.add(static_cast<double>(s.exceed[e][j]));
            }
            stats.exceedance[e][j] = count.value() / n;
        }
    }
    return stats;
}

SupermartingaleReport supermartingale_check(const McStats& stats, double h) {
    if (!stats.has_V) throw ConfigError("supermartingale_check: no V series in the statistics");
    SupermartingaleReport report;
    double scale = 0.0;
    for (double v : stats.mean_V) scale = std::max(scale, std::abs(v));
    report.slack = h * std::max(scale, 1e-12);

    // Running minimum over earlier grid points of mean_V + 3 se; any later
    // mean_V - 3 se above it by more than the slack is a violation.
    double floor = std::numeric_limits<double>::infinity();
    double floor_t = stats.times.empty() ? 0.0 : stats.times.front();
    report.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < stats.times.size(); ++j) {
        const double upper = stats.mean_V[j] + 3.0 * stats.se_V[j];
        const double lower = stats.mean_V[j] - 3.0 * stats.se_V[j];
        if (j > 0) {
            const double violation = lower - floor - report.slack;
            if (violation > report.worst_violation) {
                report.worst_violation = violation;
                report.worst_from = floor_t;
                report.worst_to = stats.times[j];
            }
        }
        if (upper < floor) {
            floor = upper;
            floor_t = stats.times[j];
        }
    }
    if (!std::isfinite(report.worst_violation)) report.worst_violation = 0.0;
    report.pass = report.worst_violation <= 0.0;
    return report;
}

DynkinReport dynkin_residual(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
                             const SwitchingFamily& family, const RateMap& rates,
                             ModeId initial_mode, const DelayFunction& delay,
                             const InitialSegment& init, double h, double horizon, int trials,
                             std::uint64_t seed) {
    if (trials < 2) throw ConfigError("dynkin_residual: trials must be >= 2");
    model.validate_shapes();
    const GeneralSds sds = GeneralSds::from(model);
    const double tau_b = delay.tau_b();

    std::vector<double> residuals(static_cast<std::size_t>(trials));
    double v0 = 0.0;  // deterministic across trials: same phi, same initial mode
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const SwitchingPath path =
            sample_path_stream(family, rates, initial_mode, horizon, seed, 2 * i);
        const Trajectory traj =
            integrate_stream(sds, path, delay, init, h, horizon, seed, 2 * i + 1);
        const V1Evaluator evaluator(spec, model, delay, traj, init);
        if (i == 0) v0 = evaluator.at_index(0);

        // Trapezoid in the continuous arguments; the mode active on the step
        // (right-continuous at its left endpoint) is held at both ends, so a
        // piecewise-constant integrand is integrated exactly.
        CompensatedSum integral;
        for (std::size_t j = 0; j + 1 < traj.times.size(); ++j) {
            const ModeId mode = traj.modes[j];
            const auto generator_at = [&](std::size_t idx) {
                const double t = traj.times[idx];
                const Eigen::VectorXd xdel =
                    traj.state_at(t - delay.tau(t), &init, tau_b);
                const GeneratorValue gen = eval_generator_V1(
                    spec, model, family, rates, traj.states[idx], xdel, mode, t, delay);
                if (gen.is_bound)
                    throw ConfigError(
                        "dynkin_residual: the switching family only bounds the jump term here; "
                        "the Dynkin identity needs the exact conditional law");
                return gen.value;
            };
            const double dt = traj.times[j + 1] - traj.times[j];
            integral.add(0.5 * dt * (generator_at(j) + generator_at(j + 1)));
        }
        residuals[i] = evaluator.at_index(traj.times.size() - 1) - evaluator.at_index(0) -
                       integral.value();
    }

    DynkinReport report;
    report.trials = trials;
    CompensatedSum sum;
    for (double r : residuals) sum.add(r);
    report.residual = sum.value() / static_cast<double>(trials);
    CompensatedSum var;
    for (double r : residuals) var.add((r - report.residual) * (r - report.residual));
    report.se = std::sqrt(var.value() / (static_cast<double>(trials) - 1.0) /
                          static_cast<double>(trials));

    // C sqrt(h) allowance calibrated on the deterministic linear test
    // (dx = -x dt, V = x^2), whose residual is about 0.45 h V(0).
    const double C = 0.3;
    report.allowance = 3.0 * report.se + C * std::sqrt(h) * std::max(1.0, std::abs(v0));
    report.pass = std::abs(report.residual) <= report.allowance;
    return report;
}

Classification classify_stability(const McStats& stats, const NuFunction& nu,
                                  const ClassificationOptions& options) {
    Classification out;
    if (stats.times.empty()) throw ConfigError("classify_stability: empty statistics");
    const std::size_t points = stats.times.size();

    if (nu.value(stats.times.back()) < 10.0 * nu.value(stats.times.front()))
        out.diagnostics.push_back(
            "nu grew by less than 10x over the horizon; classification has little power");

    // Mean-square: tail mean below the threshold and no larger than the
    // preceding window's mean.
    const std::size_t tail = std::max<std::size_t>(1, points / 10);
    double tail_mean = 0.0, prev_mean = 0.0;
    for (std::size_t j = points - tail; j < points; ++j) tail_mean += stats.mean_x2[j];
    tail_mean /= static_cast<double>(tail);
    const std::size_t prev_hi = points - tail;
    const std::size_t prev_lo = prev_hi >= tail ? prev_hi - tail : 0;
    for (std::size_t j = prev_lo; j < prev_hi; ++j) prev_mean += stats.mean_x2[j];
    prev_mean /= std::max<double>(1.0, static_cast<double>(prev_hi - prev_lo));
    out.mean_square = tail_mean < options.mean_square_threshold && tail_mean <= prev_mean * (1.0 + 1e-12);

    // nu-mean-square: sup nu E|x|^2 finite and attained in the first half.
    double sup = -std::numeric_limits<double>::infinity();
    std::size_t argmax = 0;
    for (std::size_t j = 0; j < points; ++j) {
        if (stats.nu_mean_x2[j] > sup) {
            sup = stats.nu_mean_x2[j];
            argmax = j;
        }
    }
    out.M_estimate = sup;
    out.M_argmax_t = stats.times[argmax];
    out.nu_mean_square = std::isfinite(sup) && stats.times[argmax] <= 0.5 * stats.times.back();

    // In probability: final exceedance below the level with a 3-sigma margin.
    const double n = std::max(1, stats.trials - stats.diverged);
    out.in_probability.resize(stats.epsilons.size());
    for (std::size_t e = 0; e < stats.epsilons.size(); ++e) {
        const double p = stats.exceedance[e].back();
        const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
        out.in_probability[e] = p + 3.0 * se <= options.exceedance_level;
    }
    if (stats.diverged > 0)
        out.diagnostics.push_back(std::to_string(stats.diverged) + " trial(s) diverged");
    return out;
}

}  // namespace switchsde
