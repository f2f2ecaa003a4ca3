#pragma once

#include <string>
#include <vector>

#include "switchsde/delay.hpp"
#include "switchsde/errors.hpp"

namespace switchsde {

/// Non-random right-continuous coefficient: constant or piecewise constant.
class TimeFunction {
public:
    static TimeFunction constant(double value);
    static TimeFunction piecewise(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;

    bool is_constant() const { return times_.empty(); }
    double constant_value() const { return values_.front(); }
    const std::vector<double>& breakpoints() const { return times_; }
    const std::vector<double>& values() const { return values_; }

private:
    TimeFunction() = default;
    std::vector<double> times_;   // breakpoints; values_[k] holds on [times_[k-1], times_[k])
    std::vector<double> values_;  // one more entry than times_
};

/// The comparison dynamics of the Halanay argument, integrated with
/// equality (worst case):
///   u'(t) = -alpha(t) u(t) + beta(t) sup_{t - tau(t) <= s <= t} u(s) + J0,
/// u = u0 on [-tau_b, 0]. The theorem needs alpha(t) - beta(t) >= eta > 0
/// and then bounds u by max(J0 / eta, u0).
struct HalanayProblem {
    TimeFunction alpha = TimeFunction::constant(1.0);
    TimeFunction beta = TimeFunction::constant(0.0);
    double eta = 0.0;
    double J0 = 0.0;
    DelayFunction delay = DelayFunction::constant(1.0);
    double u0 = 0.0;
};

struct HalanaySeries {
    std::vector<double> times;
    std::vector<double> values;
};

/// Explicit Euler on the comparison dynamics; the window sup runs over all
/// stored grid points in [t - tau(t), t] plus the constant initial history.
HalanaySeries halanay_integrate(const HalanayProblem& p, double h, double horizon);

struct HalanayReport {
    double bound = 0.0;           // max(J0 / eta, u0)
    double max_violation = 0.0;   // max over the grid of u - bound
    double slack = 0.0;           // 10 h alpha_max u_max, the explicit-Euler allowance
    bool precondition_ok = true;  // alpha - beta >= eta on the grid
    double precondition_worst_t = 0.0;
    bool pass = false;
    std::string message;
};

HalanayReport halanay_bound_check(const HalanayProblem& p, double h, double horizon);

}  // namespace switchsde
