#pragma once

#include <vector>

#include <Eigen/Dense>

#include "switchsde/certificates.hpp"
#include "switchsde/delay.hpp"
#include "switchsde/integrator.hpp"
#include "switchsde/model.hpp"
#include "switchsde/nu.hpp"
#include "switchsde/switching.hpp"

namespace switchsde {

/// V1(x_t, t, r) = nu(t) [ x' P(r) x + 2 sum_i Z_i \int_0^{x_i} g_i ]
///               + \int_{t - tau(t)}^t nu(s) g(x(s))' Q g(x(s)) ds.
struct LyapunovV1Spec {
    std::vector<Eigen::MatrixXd> P;
    Eigen::VectorXd Z;
    Eigen::MatrixXd Q;
    NuFunction nu;

    static LyapunovV1Spec from(const CertificateThm4& cert, NuFunction nu);
};

/// V2(x_t, t, r) = nu(t) x' P(r) x.
struct LyapunovV2Spec {
    std::vector<Eigen::MatrixXd> P;
    NuFunction nu;
};

/// Evaluates V1 along one stored trajectory. The history integral runs on
/// the trajectory grid (the initial segment fills times below zero) with the
/// trapezoid rule; a prefix sum makes repeated evaluations O(log) each.
class V1Evaluator {
public:
    V1Evaluator(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
                const DelayFunction& delay, const Trajectory& traj, const InitialSegment& init);

    double at_index(std::size_t grid_index) const;
    double at_time(double t) const;  // t must sit on the trajectory grid

private:
    double integral_between(double lo, double hi) const;
    double prefix_at(double s) const;

    const LyapunovV1Spec& spec_;
    const SwitchedNetworkModel& model_;
    const DelayFunction& delay_;
    const Trajectory& traj_;
    std::vector<double> nodes_;      // [-tau_b history nodes] + trajectory times
    std::vector<double> integrand_;  // nu(s) g(x(s))' Q g(x(s)) at the nodes
    std::vector<double> prefix_;     // cumulative trapezoid integral
    std::size_t traj_offset_ = 0;    // index of trajectory time 0 in nodes_
};

double eval_V1(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
               const DelayFunction& delay, const Trajectory& traj, const InitialSegment& init,
               double t);

double eval_V2(const LyapunovV2Spec& spec, const Eigen::VectorXd& x, ModeId mode, double t);

/// The pointwise infinitesimal generator of V1 at one state, per the
/// closed-form expression: nu'-term, drift coupling, the noise trace
/// tr(sigma' [P + Z G'(x)] sigma), the switching chi term, and the
/// delay-integral boundary terms. is_bound propagates the conservative
/// chi bound (reflected-max walk off the maximum).
struct GeneratorValue {
    double value = 0.0;
    bool is_bound = false;
};

GeneratorValue eval_generator_V1(const LyapunovV1Spec& spec, const SwitchedNetworkModel& model,
                                 const SwitchingFamily& family, const RateMap& rates,
                                 const Eigen::VectorXd& x_now, const Eigen::VectorXd& x_delayed,
                                 ModeId mode, double t, const DelayFunction& delay);

}  // namespace switchsde
