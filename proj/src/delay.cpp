#include "switchsde/delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace switchsde {

DelayFunction DelayFunction::constant(double value) {
    if (!(value > 0.0)) throw ConfigError("constant delay must be positive");
    DelayFunction d;
    d.kind_ = Kind::Constant;
    d.b_ = value;
    d.tau_star_ = value;
    d.tau_b_ = value;  // sup(value - t) attained at t = 0
    return d;
}

DelayFunction DelayFunction::affine(double slope, double intercept) {
    if (!(intercept > 0.0)) throw ConfigError("affine delay: intercept must be positive");
    if (slope < 0.0) throw ConfigError("affine delay: negative slope makes tau(t) eventually non-positive");
    DelayFunction d;
    d.kind_ = Kind::Affine;
    d.a_ = slope;
    d.b_ = intercept;
    d.tau_star_ = intercept;
    // sup((slope - 1) t + intercept): finite only while slope <= 1.
    d.tau_b_ = slope <= 1.0 ? intercept : std::numeric_limits<double>::infinity();
    return d;
}

DelayFunction DelayFunction::custom(std::function<double(double)> tau,
                                    std::function<double(double)> dtau,
                                    double tau_star, double tau_b) {
    if (!tau || !dtau) throw ConfigError("custom delay: tau and tau' must both be supplied");
    if (!(tau_star > 0.0)) throw ConfigError("custom delay: tau_star must be positive");
    if (!(tau_b > 0.0)) throw ConfigError("custom delay: tau_b must be positive");
    DelayFunction d;
    d.kind_ = Kind::Custom;
    d.tau_fn_ = std::move(tau);
    d.dtau_fn_ = std::move(dtau);
    d.tau_star_ = tau_star;
    d.tau_b_ = tau_b;
    return d;
}

double DelayFunction::tau(double t) const {
    switch (kind_) {
        case Kind::Constant: return b_;
        case Kind::Affine: return a_ * t + b_;
        case Kind::Custom: return tau_fn_(t);
    }
    return b_;
}

double DelayFunction::dtau(double t) const {
    switch (kind_) {
        case Kind::Constant: return 0.0;
        case Kind::Affine: return a_;
        case Kind::Custom: return dtau_fn_(t);
    }
    return 0.0;
}

double DelayFunction::constant_value() const {
    if (kind_ != Kind::Constant) throw std::logic_error("delay is not constant");
    return b_;
}

double DelayFunction::affine_slope() const {
    if (kind_ != Kind::Affine) throw std::logic_error("delay is not affine");
    return a_;
}

double DelayFunction::affine_intercept() const {
    if (kind_ != Kind::Affine) throw std::logic_error("delay is not affine");
    return b_;
}

DelayReport validate_delay(const DelayFunction& d, const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("validate_delay: empty grid");

    DelayReport report;
    report.tau_star_claimed = d.tau_star();
    report.tau_b_claimed = d.tau_b();

    double min_tau = std::numeric_limits<double>::infinity();
    double max_gap = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        const double value = d.tau(t);
        if (!(value > 0.0) && report.positivity_ok) {
            report.positivity_ok = false;
            report.positivity_witness_t = t;
        }
        min_tau = std::min(min_tau, value);
        max_gap = std::max(max_gap, value - t);
        const double slope = d.dtau(t);
        if (slope >= 1.0 && !report.derivative_reaches_one) {
            report.derivative_reaches_one = true;
            report.derivative_witness_t = t;
        }
    }
    report.tau_star_estimate = min_tau;
    report.tau_b_estimate = max_gap;

    const double tol = 1e-9 * std::max({1.0, std::abs(report.tau_star_claimed),
                                        std::abs(report.tau_b_estimate)});
    double err = std::abs(report.tau_star_claimed - report.tau_star_estimate);
    if (std::isfinite(report.tau_b_claimed))
        err = std::max(err, std::abs(report.tau_b_claimed - report.tau_b_estimate));
    report.max_claim_error = err;

    // The grid only samples, so tau_star may only be claimed at or below the
    // grid minimum and tau_b at or above the grid maximum of tau(t) - t.
    const bool star_ok = report.tau_star_claimed <= report.tau_star_estimate + tol;
    const bool gap_ok = report.tau_b_claimed + tol >= report.tau_b_estimate;
    report.pass = report.positivity_ok && star_ok && gap_ok;

    if (!report.positivity_ok)
        report.message = "tau(t) <= 0 at t = " + std::to_string(report.positivity_witness_t);
    else if (!star_ok)
        report.message = "claimed tau_star exceeds the grid minimum of tau";
    else if (!gap_ok)
        report.message = "claimed tau_b is below the grid maximum of tau(t) - t";
    else if (report.derivative_reaches_one)
        report.message = "tau'(t) >= 1 at t = " + std::to_string(report.derivative_witness_t) +
                         "; the Theorem-4 beta constant is non-positive there";
    else
        report.message = "ok";
    return report;
}

}  // namespace switchsde
