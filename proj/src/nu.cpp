#include "switchsde/nu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace switchsde {

NuFunction NuFunction::exponential(double alpha) {
    NuFunction f;
    f.kind_ = Kind::Exponential;
    f.alpha_ = alpha;
    return f;
}

NuFunction NuFunction::power(double alpha, double tau_b) {
    if (!(tau_b >= 0.0) || !std::isfinite(tau_b))
        throw ConfigError("power nu: tau_b must be finite and non-negative");
    NuFunction f;
    f.kind_ = Kind::Power;
    f.alpha_ = alpha;
    f.shift_ = tau_b + 1.0;
    return f;
}

NuFunction NuFunction::log(double tau_b) {
    if (!(tau_b >= 0.0) || !std::isfinite(tau_b))
        throw ConfigError("log nu: tau_b must be finite and non-negative");
    NuFunction f;
    f.kind_ = Kind::Log;
    f.shift_ = tau_b + 1.0;
    return f;
}

NuFunction NuFunction::loglog(double tau_b) {
    if (!(tau_b >= 0.0) || !std::isfinite(tau_b))
        throw ConfigError("loglog nu: tau_b must be finite and non-negative");
    NuFunction f;
    f.kind_ = Kind::LogLog;
    f.shift_ = tau_b + 3.0;
    return f;
}

NuFunction NuFunction::custom(std::function<double(double)> nu,
                              std::function<double(double)> dnu) {
    if (!nu || !dnu) throw ConfigError("custom nu: nu and nu' must both be supplied");
    NuFunction f;
    f.kind_ = Kind::Custom;
    f.nu_fn_ = std::move(nu);
    f.dnu_fn_ = std::move(dnu);
    return f;
}

double NuFunction::value(double t) const {
    switch (kind_) {
        case Kind::Exponential: return std::exp(alpha_ * t);
        case Kind::Power: return std::pow(t + shift_, alpha_);
        case Kind::Log: return std::log(t + shift_);
        case Kind::LogLog: return std::log(std::log(t + shift_));
        case Kind::Custom: return nu_fn_(t);
    }
    return 0.0;
}

double NuFunction::derivative(double t) const {
    switch (kind_) {
        case Kind::Exponential: return alpha_ * std::exp(alpha_ * t);
        case Kind::Power: return alpha_ * std::pow(t + shift_, alpha_ - 1.0);
        case Kind::Log: return 1.0 / (t + shift_);
        case Kind::LogLog: return 1.0 / ((t + shift_) * std::log(t + shift_));
        case Kind::Custom: return dnu_fn_(t);
    }
    return 0.0;
}

bool NuFunction::diverges() const {
    switch (kind_) {
        case Kind::Exponential: return alpha_ > 0.0;
        case Kind::Power: return alpha_ > 0.0;
        case Kind::Log:
        case Kind::LogLog: return true;
        case Kind::Custom: return false;
    }
    return false;
}

std::vector<double> default_grid(double horizon, int points) {
    if (!(horizon > 0.0)) throw ConfigError("grid horizon must be positive");
    if (points < 2) throw ConfigError("grid needs at least two points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = horizon * static_cast<double>(i) / (points - 1);
    return grid;
}

namespace {

struct ClosedForm {
    bool available = false;
    bool attained = false;  // every extremum sits at t = 0 (or is t-independent)
    double alpha_nu = 0.0, beta4 = 0.0, beta5 = 0.0;
};

// Extrema analysis for the documented pairs. For exp(alpha t):
//   nu'/nu = alpha;  (1 - a) exp(-alpha tau(t));  exp(alpha tau(t)).
// Constant tau gives t-independent values. For (t + s)^alpha with affine
// tau = a t + b and s = b + 1, the three expressions are monotone in t, so
// the extremum is at t = 0 or at infinity depending on sign(1 - (1-a) s).
ClosedForm closed_form(const NuFunction& nu, const DelayFunction& delay) {
    ClosedForm cf;
    const double alpha = nu.alpha();

    if (nu.kind() == NuFunction::Kind::Exponential) {
        if (delay.kind() == DelayFunction::Kind::Constant ||
            (delay.kind() == DelayFunction::Kind::Affine && delay.affine_slope() == 0.0)) {
            const double c = delay.kind() == DelayFunction::Kind::Constant
                                 ? delay.constant_value()
                                 : delay.affine_intercept();
            cf.available = true;
            cf.attained = true;
            cf.alpha_nu = alpha;
            cf.beta4 = std::exp(-alpha * c);
            cf.beta5 = std::exp(alpha * c);
        }
        return cf;
    }

    if (nu.kind() != NuFunction::Kind::Power) return cf;

    double slope = 0.0, intercept = 0.0;
    if (delay.kind() == DelayFunction::Kind::Constant) {
        intercept = delay.constant_value();
    } else if (delay.kind() == DelayFunction::Kind::Affine) {
        slope = delay.affine_slope();
        intercept = delay.affine_intercept();
    } else {
        return cf;
    }
    if (slope >= 1.0) return cf;

    const double s = nu.shift_base();  // tau_b + 1 = intercept + 1
    if (std::abs(s - (intercept + 1.0)) > 1e-12 * std::max(1.0, s))
        return cf;  // nu was built against a different tau_b
    cf.available = true;
    cf.alpha_nu = alpha / s;  // sup alpha / (t + s) at t = 0

    // ratio r(t) = nu(t - tau(t)) / nu(t) = (((1-a) t + s - b) / (t + s))^alpha;
    // with s = b + 1 the numerator base is (1-a) t + 1. The base is monotone
    // with derivative sign = sign((1-a) s - 1).
    const double base0 = 1.0 / s;
    const double base_inf = 1.0 - slope;
    const double worst = std::min(base0, base_inf);
    cf.beta4 = (1.0 - slope) * std::pow(worst, alpha);
    cf.beta5 = std::pow(1.0 / worst, alpha);
    // All three extrema sit at t = 0 exactly when the ratio base is
    // non-decreasing, i.e. (1 - slope)(intercept + 1) >= 1.
    cf.attained = (1.0 - slope) * s >= 1.0;
    return cf;
}

}  // namespace

NuConstants nu_constants(const NuFunction& nu, const DelayFunction& delay,
                         const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("nu_constants: empty grid");
    if (!nu.diverges() && nu.kind() != NuFunction::Kind::Custom)
        throw ConfigError("nu_constants: nu must diverge (alpha > 0 for the exponential and power variants)");

    double sup_ratio = -std::numeric_limits<double>::infinity();
    double inf_beta4 = std::numeric_limits<double>::infinity();
    double sup_beta5 = -std::numeric_limits<double>::infinity();

    for (double t : grid) {
        const double v = nu.value(t);
        if (!(v > 0.0))
            throw ConfigError("nu_constants: nu(t) <= 0 at t = " + std::to_string(t));
        const double lagged = nu.value(t - delay.tau(t));
        if (lagged < 0.0)
            throw ConfigError("nu_constants: nu(t - tau(t)) < 0 at t = " + std::to_string(t));
        sup_ratio = std::max(sup_ratio, nu.derivative(t) / v);
        inf_beta4 = std::min(inf_beta4, (1.0 - delay.dtau(t)) * lagged / v);
        sup_beta5 = lagged > 0.0
                        ? std::max(sup_beta5, v / lagged)
                        : std::numeric_limits<double>::infinity();
    }

    NuConstants out;
    out.alpha_nu = sup_ratio;
    out.beta_nu_thm4 = inf_beta4;
    out.beta_nu_thm5 = sup_beta5;

    const ClosedForm cf = closed_form(nu, delay);
    out.has_closed_form = cf.available;
    out.attained = cf.available && cf.attained && grid.front() == 0.0;
    if (cf.available) {
        out.cf_alpha_nu = cf.alpha_nu;
        out.cf_beta_nu_thm4 = cf.beta4;
        out.cf_beta_nu_thm5 = cf.beta5;
    }
    if (out.attained) {
        const auto agree = [](double closed, double estimate) {
            return std::abs(closed - estimate) <= 1e-6 * std::max(std::abs(closed), 1e-300);
        };
        if (!agree(cf.alpha_nu, out.alpha_nu) || !agree(cf.beta4, out.beta_nu_thm4) ||
            !agree(cf.beta5, out.beta_nu_thm5))
            throw std::logic_error("nu_constants: closed form and grid estimate disagree");
    }
    return out;
}

}  // namespace switchsde
