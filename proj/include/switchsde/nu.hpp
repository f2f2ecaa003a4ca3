#pragma once

#include <functional>
#include <string>
#include <vector>

#include "switchsde/delay.hpp"
#include "switchsde/errors.hpp"

namespace switchsde {

/// Weight function nu(t) from the stability definitions. The built-in
/// variants follow the standard families: exp(alpha t) for exponential
/// stability, (t + tau_b + 1)^alpha for power stability, ln(t + tau_b + 1)
/// and ln ln(t + tau_b + 3) for the logarithmic flavors. The shifts keep
/// nu well defined on the whole history interval [-tau_b, infinity).
class NuFunction {
public:
    enum class Kind { Exponential, Power, Log, LogLog, Custom };

    static NuFunction exponential(double alpha);
    static NuFunction power(double alpha, double tau_b);
    static NuFunction log(double tau_b);
    static NuFunction loglog(double tau_b);
    static NuFunction custom(std::function<double(double)> nu,
                             std::function<double(double)> dnu);

    double value(double t) const;
    double derivative(double t) const;
    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double shift_base() const { return shift_; }

    /// True for the variants that provably diverge; Custom cannot be checked.
    bool diverges() const;

private:
    NuFunction() = default;

    Kind kind_ = Kind::Exponential;
    double alpha_ = 0.0;
    double shift_ = 0.0;  // tau_b + 1 (Power/Log), tau_b + 3 (LogLog)
    std::function<double(double)> nu_fn_, dnu_fn_;
};

/// The certificate constants of a (nu, delay) pair:
///   alpha_nu       >= sup  nu'(t) / nu(t)
///   beta_nu_thm4   <= inf (1 - tau'(t)) nu(t - tau(t)) / nu(t)
///   beta_nu_thm5   >= sup  nu(t) / nu(t - tau(t))
/// Grid estimates always; closed forms for the Exponential and Power
/// variants with constant or affine delays. `attained` says whether the
/// closed-form extremum sits on the grid (then the two must agree).
struct NuConstants {
    double alpha_nu = 0.0;
    double beta_nu_thm4 = 0.0;
    double beta_nu_thm5 = 0.0;
    bool has_closed_form = false;
    bool attained = false;
    double cf_alpha_nu = 0.0;
    double cf_beta_nu_thm4 = 0.0;
    double cf_beta_nu_thm5 = 0.0;
};

NuConstants nu_constants(const NuFunction& nu, const DelayFunction& delay,
                         const std::vector<double>& grid);

/// 2001 uniform points on [0, horizon], the default validation grid.
std::vector<double> default_grid(double horizon, int points = 2001);

}  // namespace switchsde
