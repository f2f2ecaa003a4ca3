#include "switchsde/halanay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace switchsde {

TimeFunction TimeFunction::constant(double value) {
    TimeFunction f;
    f.values_ = {value};
    return f;
}

TimeFunction TimeFunction::piecewise(std::vector<double> times, std::vector<double> values) {
    if (values.size() != times.size() + 1)
        throw ConfigError("piecewise time function: need one more value than breakpoints");
    if (!std::is_sorted(times.begin(), times.end()))
        throw ConfigError("piecewise time function: breakpoints must be increasing");
    TimeFunction f;
    f.times_ = std::move(times);
    f.values_ = std::move(values);
    return f;
}

double TimeFunction::operator()(double t) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin())];
}

HalanaySeries halanay_integrate(const HalanayProblem& p, double h, double horizon) {
    if (!(h > 0.0)) throw ConfigError("halanay_integrate: step size must be positive");
    if (!(horizon > 0.0)) throw ConfigError("halanay_integrate: horizon must be positive");
    const double tau_b = p.delay.tau_b();
    if (!std::isfinite(tau_b))
        throw ConfigError("halanay_integrate: tau_b must be finite");

    const auto steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
    HalanaySeries series;
    series.times.reserve(steps + 1);
    series.values.reserve(steps + 1);
    series.times.push_back(0.0);
    series.values.push_back(p.u0);

    for (std::size_t j = 0; j < steps; ++j) {
        const double t = series.times[j];
        const double lag = t - p.delay.tau(t);
        if (lag < -tau_b - 1e-9 * std::max(1.0, tau_b))
            throw std::domain_error("halanay_integrate: window reaches below -tau_b at t = " +
                                    std::to_string(t));

        // sup over every stored grid point in [t - tau(t), t]; the constant
        // initial history contributes u0 whenever the window dips below 0.
        double window_sup = lag < 0.0 ? p.u0 : -std::numeric_limits<double>::infinity();
        const auto first =
            std::lower_bound(series.times.begin(), series.times.begin() + static_cast<long>(j) + 1, lag);
        for (auto it = first; it != series.times.begin() + static_cast<long>(j) + 1; ++it) {
            const auto idx = static_cast<std::size_t>(it - series.times.begin());
            window_sup = std::max(window_sup, series.values[idx]);
        }

        const double u = series.values[j];
        const double du = -p.alpha(t) * u + p.beta(t) * window_sup + p.J0;
        const double next_t = std::min(t + h, horizon);
        series.times.push_back(next_t);
        series.values.push_back(u + (next_t - t) * du);
    }
    return series;
}

HalanayReport halanay_bound_check(const HalanayProblem& p, double h, double horizon) {
    HalanayReport report;

    // Precondition alpha(t) - beta(t) >= eta on the grid.
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
    for (std::size_t j = 0; j <= steps; ++j) {
        const double t = std::min(h * static_cast<double>(j), horizon);
        if (p.alpha(t) - p.beta(t) < p.eta - 1e-12) {
            report.precondition_ok = false;
            report.precondition_worst_t = t;
            break;
        }
    }
    if (!(p.eta > 0.0)) report.precondition_ok = false;
    if (!report.precondition_ok) {
        report.pass = false;
        report.message = "alpha(t) - beta(t) >= eta fails; the comparison theorem does not apply";
        return report;
    }

    const HalanaySeries series = halanay_integrate(p, h, horizon);
    report.bound = std::max(p.J0 / p.eta, p.u0);

    double u_max = 0.0, alpha_max = 0.0, violation = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < series.times.size(); ++j) {
        u_max = std::max(u_max, std::abs(series.values[j]));
        alpha_max = std::max(alpha_max, p.alpha(series.times[j]));
        violation = std::max(violation, series.values[j] - report.bound);
    }
    report.max_violation = violation;
    report.slack = 10.0 * h * alpha_max * u_max;
    report.pass = violation <= report.slack;
    report.message = report.pass ? "ok" : "u(t) exceeded the Halanay bound beyond the Euler slack";
    return report;
}

}  // namespace switchsde
