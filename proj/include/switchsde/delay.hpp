#pragma once

#include <functional>
#include <string>
#include <vector>

#include "switchsde/errors.hpp"

namespace switchsde {

/// Time-varying delay tau(t) with its derivative and the two problem
/// constants tau_star = inf{tau(t) : t >= 0} and tau_b = sup{tau(t) - t},
/// both required positive. The affine variant tau(t) = slope * t + intercept
/// covers the unbounded-delay experiments.
class DelayFunction {
public:
    enum class Kind { Constant, Affine, Custom };

    static DelayFunction constant(double value);
    static DelayFunction affine(double slope, double intercept);
    static DelayFunction custom(std::function<double(double)> tau,
                                std::function<double(double)> dtau,
                                double tau_star, double tau_b);

    double tau(double t) const;
    double dtau(double t) const;
    double tau_star() const { return tau_star_; }
    double tau_b() const { return tau_b_; }
    Kind kind() const { return kind_; }

    double constant_value() const;
    double affine_slope() const;
    double affine_intercept() const;

private:
    DelayFunction() = default;

    Kind kind_ = Kind::Constant;
    double a_ = 0.0, b_ = 0.0;  // affine coefficients; constant stores b_
    std::function<double(double)> tau_fn_, dtau_fn_;
    double tau_star_ = 0.0, tau_b_ = 0.0;
};

struct DelayReport {
    double tau_star_claimed = 0.0;
    double tau_star_estimate = 0.0;
    double tau_b_claimed = 0.0;
    double tau_b_estimate = 0.0;
    double max_claim_error = 0.0;
    bool positivity_ok = true;
    double positivity_witness_t = 0.0;
    bool derivative_reaches_one = false;  // tau'(t) >= 1 somewhere on the grid
    double derivative_witness_t = 0.0;
    bool pass = false;
    std::string message;
};

/// Confirms the declared tau_star / tau_b against grid extrema and flags
/// tau' >= 1 (which drives the Theorem-4 beta constant non-positive).
DelayReport validate_delay(const DelayFunction& d, const std::vector<double>& grid);

}  // namespace switchsde
