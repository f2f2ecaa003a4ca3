#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchsde/errors.hpp"
#include "switchsde/switching.hpp"

namespace switchsde {

/// Per-coordinate output nonlinearity with derivative bounds G_i > 0.
/// g_i(0) = 0 and 0 <= g_i' <= G_i are the standing hypotheses;
/// gintegral(i, x) = \int_0^x g_i, needed by the Lyapunov functional.
struct Nonlinearity {
    enum class Kind { Tanh, Linear, Custom };

    Kind kind = Kind::Tanh;
    std::function<double(int, double)> g;
    std::function<double(int, double)> gprime;
    std::function<double(int, double)> gintegral;
    Eigen::VectorXd G;

    static Nonlinearity tanh(int n);
    static Nonlinearity linear(int n);  // g_i(x) = x, handy for linear tests
};

/// Noise intensity sigma(u, v, xi); u and v are the current and delayed
/// nonlinear outputs. All built-in variants are single-column (one shared
/// Brownian motion); Custom may return an n x m matrix.
struct NoiseSpec {
    enum class Kind { Zero, DelayedOutput, LinearMix, Custom };

    Kind kind = Kind::DelayedOutput;
    std::vector<Eigen::MatrixXd> C1, C2;  // LinearMix: sigma = C1(xi) u + C2(xi) v
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&, ModeId)> fn;
    int custom_width = 1;

    static NoiseSpec zero();
    static NoiseSpec delayed_output();
    static NoiseSpec linear_mix(std::vector<Eigen::MatrixXd> C1, std::vector<Eigen::MatrixXd> C2);

    Eigen::MatrixXd eval(const Eigen::VectorXd& u, const Eigen::VectorXd& v, ModeId mode) const;
    int width() const;  // Brownian dimension m
};

/// The switched delayed networked system
///   dx = [-D(r) x + A(r) g(x) + B(r) g(x_tau)] dt + sigma(g(x), g(x_tau), r) dW.
/// D(xi) is positive diagonal; a(xi), E(xi), F(xi) are the noise-bound data
/// of hypothesis H3.
struct SwitchedNetworkModel {
    int n = 0;
    std::vector<Eigen::MatrixXd> D, A, B;
    Nonlinearity nonlinearity;
    NoiseSpec noise;
    std::vector<double> a;
    std::vector<Eigen::MatrixXd> E, F;

    int mode_count() const { return static_cast<int>(D.size()); }
    void validate_shapes() const;

    Eigen::VectorXd g(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gprime(const Eigen::VectorXd& x) const;
    double gintegral_sum(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const;

    Eigen::VectorXd drift(const Eigen::VectorXd& x, const Eigen::VectorXd& xdel, ModeId mode) const;
    Eigen::MatrixXd sigma(const Eigen::VectorXd& x, const Eigen::VectorXd& xdel, ModeId mode) const;
};

struct HypothesisViolation {
    Eigen::VectorXd u, v;
    ModeId mode = 0;
    double lhs = 0.0, rhs = 0.0;
    std::string which;  // "H3-2" or "H3-3"
};

struct HypothesisReport {
    bool g_zero_ok = true;
    bool g_slope_ok = true;
    double worst_slope = 0.0;
    double worst_slope_x = 0.0;
    bool h32_ok = true;
    bool h33_ok = true;
    bool h33_checked = false;
    double min_slack_h32 = 0.0;  // min over samples of rhs - lhs
    double min_slack_h33 = 0.0;
    std::vector<HypothesisViolation> violations;
    bool pass = false;
    std::string message;
};

/// Samples (u, v) pairs uniformly in the ball of the given radius, per mode,
/// and checks the H3 trace bounds; also checks H2 (g(0) = 0, 0 <= g' <= G)
/// on a 1-D grid over [-radius, radius]. The H3-(3) bound needs the P family
/// and is skipped when none is supplied. Deterministic given the seed.
HypothesisReport validate_hypotheses(const SwitchedNetworkModel& m, int sample_count,
                                     double radius, std::uint64_t seed,
                                     const std::vector<Eigen::MatrixXd>* P = nullptr);

}  // namespace switchsde
