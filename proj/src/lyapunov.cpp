#include "switchsde/lyapunov.hpp"

#include <algorithm>
#include <cmath>

namespace switchsde {

LyapunovV1Spec LyapunovV1Spec::from(const CertificateThm4& cert, NuFunction nu) {
    LyapunovV1Spec spec{cert.P, cert.Z, cert.Q, std::move(nu)};
    return spec;
}

V1Evaluator::V1Evaluator(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
                         const DelayFunction& delay, const Trajectory& traj,
                         const InitialSegment& init)
    : spec_(spec), model_(model), delay_(delay), traj_(traj) {
    if (traj.times.empty()) throw std::invalid_argument("V1 evaluator: empty trajectory");
    const double tau_b = delay.tau_b();
    if (!std::isfinite(tau_b))
        throw ConfigError("V1 evaluator: unbounded tau_b is not supported");

    // History nodes on [-tau_b, 0) at roughly the trajectory's base step.
    double base_step = 0.0;
    for (std::size_t j = 0; j + 1 < traj.times.size(); ++j)
        base_step = std::max(base_step, traj.times[j + 1] - traj.times[j]);
    if (!(base_step > 0.0)) base_step = tau_b;
    const auto hist_steps = static_cast<std::size_t>(std::ceil(tau_b / base_step - 1e-9));
    nodes_.reserve(hist_steps + traj.times.size());
    for (std::size_t j = 0; j < hist_steps; ++j)
        nodes_.push_back(-tau_b + tau_b * static_cast<double>(j) / static_cast<double>(hist_steps));
    traj_offset_ = nodes_.size();
    nodes_.insert(nodes_.end(), traj.times.begin(), traj.times.end());

    integrand_.resize(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const double s = nodes_[j];
        const Eigen::VectorXd x = j < traj_offset_ ? init.eval(s) : traj.states[j - traj_offset_];
        const Eigen::VectorXd g = model.g(x);
        integrand_[j] = spec.nu.value(s) * g.dot(spec.Q * g);
    }
    prefix_.resize(nodes_.size());
    prefix_[0] = 0.0;
    for (std::size_t j = 1; j < nodes_.size(); ++j)
        prefix_[j] = prefix_[j - 1] +
                     0.5 * (integrand_[j] + integrand_[j - 1]) * (nodes_[j] - nodes_[j - 1]);
}

double V1Evaluator::prefix_at(double s) const {
    if (s < nodes_.front() - 1e-9 * std::max(1.0, std::abs(nodes_.front())))
        throw std::domain_error("V1 evaluator: history shortfall at s = " + std::to_string(s));
    s = std::max(s, nodes_.front());
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), s);
    const auto idx = static_cast<std::size_t>(it - nodes_.begin());
    if (it != nodes_.end() && *it == s) return prefix_[idx];
    if (it == nodes_.end()) throw std::domain_error("V1 evaluator: query beyond the grid");
    const std::size_t lo = idx - 1;
    const double span = nodes_[idx] - nodes_[lo];
    const double w = span > 0.0 ? (s - nodes_[lo]) / span : 0.0;
    // Trapezoid over the partial segment with the integrand interpolated at s.
    const double mid = integrand_[lo] + w * (integrand_[idx] - integrand_[lo]);
    return prefix_[lo] + 0.5 * (integrand_[lo] + mid) * (s - nodes_[lo]);
}

double V1Evaluator::integral_between(double lo, double hi) const {
    return prefix_at(hi) - prefix_at(lo);
}

double V1Evaluator::at_index(std::size_t grid_index) const {
    if (grid_index >= traj_.times.size())
        throw std::domain_error("V1 evaluator: grid index out of range");
    const double t = traj_.times[grid_index];
    const Eigen::VectorXd& x = traj_.states[grid_index];
    const auto mode = static_cast<std::size_t>(traj_.modes[grid_index]);
    if (mode >= spec_.P.size())
        throw ConfigError("V1 evaluator: trajectory mode outside the certificate's mode set");

    const double pointwise =
        x.dot(spec_.P[mode] * x) + 2.0 * model_.gintegral_sum(spec_.Z, x);
    return spec_.nu.value(t) * pointwise + integral_between(t - delay_.tau(t), t);
}

double V1Evaluator::at_time(double t) const { return at_index(traj_.index_of(t)); }

double eval_V1(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
               const DelayFunction& delay, const Trajectory& traj, const InitialSegment& init,
               double t) {
    return V1Evaluator(spec, model, delay, traj, init).at_time(t);
}

double eval_V2(const LyapunovV2Spec& spec, const Eigen::VectorXd& x, ModeId mode, double t) {
    const auto k = static_cast<std::size_t>(mode);
    if (k >= spec.P.size()) throw ConfigError("V2: mode outside the certificate's mode set");
    return spec.nu.value(t) * x.dot(spec.P[k] * x);
}

GeneratorValue eval_generator_V1(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
                                 const SwitchingFamily& family, const RateMap& rates,
                                 const Eigen::VectorXd& x_now, const Eigen::VectorXd& x_delayed,
                                 ModeId mode, double t, const DelayFunction& delay) {
    const auto k = static_cast<std::size_t>(mode);
    if (k >= spec.P.size()) throw ConfigError("generator: mode outside the certificate's mode set");
    const Eigen::MatrixXd& P = spec.P[k];

    const Eigen::VectorXd g_now = model.g(x_now);
    const Eigen::VectorXd g_del = model.g(x_delayed);
    const Eigen::VectorXd drift = model.drift(x_now, x_delayed, mode);

    const double nu_t = spec.nu.value(t);
    const double dnu_t = spec.nu.derivative(t);
    const double lag = t - delay.tau(t);

    // nu'-term on the pointwise part.
    double value = dnu_t * (x_now.dot(P * x_now) + 2.0 * model.gintegral_sum(spec.Z, x_now));

    // Drift coupling 2 nu [x' P + g(x)' Z] f.
    value += 2.0 * nu_t * (x_now.dot(P * drift) + (spec.Z.asDiagonal() * g_now).dot(drift));

    // Noise trace tr(sigma' [P + Z G'(x)] sigma).
    const Eigen::MatrixXd sig = model.noise.eval(g_now, g_del, mode);
    const Eigen::MatrixXd mid =
        P + Eigen::MatrixXd((spec.Z.array() * model.gprime(x_now).array()).matrix().asDiagonal());
    value += nu_t * (sig.transpose() * mid * sig).trace();

    // Switching jump term x' chi x.
    const ChiTerm chi = chi_term(family, spec.P, mode, rates);
    value += nu_t * x_now.dot(chi.value * x_now);

    // Delay-integral boundary terms.
    value += nu_t * g_now.dot(spec.Q * g_now);
    value -= (1.0 - delay.dtau(t)) * spec.nu.value(lag) * g_del.dot(spec.Q * g_del);

    return {value, chi.is_bound};
}

}  // namespace switchsde
