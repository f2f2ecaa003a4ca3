#pragma once

// Shared fixtures for the test suites: the two-subsystem example of the
// reproduction experiments and small random-instance generators.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "switchsde/certificates.hpp"
#include "switchsde/model.hpp"
#include "switchsde/rng.hpp"
#include "switchsde/switching.hpp"

namespace testfix {

using namespace switchsde;

inline Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

/// The two-subsystem switched network driven by the reflected-max walk.
inline SwitchedNetworkModel example_model() {
    SwitchedNetworkModel m;
    m.n = 2;
    m.D = {Eigen::MatrixXd::Identity(2, 2), 8.0188 * Eigen::MatrixXd::Identity(2, 2)};
    m.A = {mat2(2.0, -0.1, -5.0, 3.0), Eigen::MatrixXd::Zero(2, 2)};
    m.B = {mat2(-1.5, -0.1, -0.2, -2.5), mat2(3.74, 2.5345, -0.228, 5.7981)};
    m.nonlinearity = Nonlinearity::tanh(2);
    m.noise = NoiseSpec::delayed_output();
    m.a = {1.0, 1.0};
    m.E = {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
    m.F = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
    return m;
}

inline RateMap example_rates() {
    RateMap rm;
    rm.rates = {50.0, 1.0};
    rm.mu0 = 50.0;
    return rm;
}

/// Published constant-delay certificate (tau = 1, nu = exp(0.01 t)).
inline CertificateThm4 example_certificate_constant() {
    CertificateThm4 cert;
    cert.P = {mat2(14.3049, -0.0796, -0.0796, 15.7607), mat2(5.1113, 0.524, 0.524, 3.5149)};
    cert.Z = Eigen::Vector2d(3.2867, 3.2867);
    cert.Q = mat2(44.7951, 3.4509, 3.4509, 62.8182);
    cert.R = {174.1615 * Eigen::MatrixXd::Identity(2, 2),
              32.1933 * Eigen::MatrixXd::Identity(2, 2)};
    cert.alpha_nu = 0.01;
    cert.beta_nu = std::exp(-0.01);
    return cert;
}

/// Published affine-delay certificate (tau = 0.1 t + 1, nu = (t + 2)^0.01).
inline CertificateThm4 example_certificate_affine() {
    CertificateThm4 cert;
    cert.P = {mat2(57.1906, -2.25, -2.25, 69.8648), mat2(14.5554, 1.0659, 1.0659, 12.9256)};
    cert.Z = Eigen::Vector2d(19.6882, 19.6882);
    cert.Q = mat2(190.248, 0.524, 0.524, 294.6908);
    cert.R = {872.3114 * Eigen::MatrixXd::Identity(2, 2),
              105.4197 * Eigen::MatrixXd::Identity(2, 2)};
    cert.alpha_nu = 0.005;
    cert.beta_nu = 0.89;
    return cert;
}

/// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_spd(int n, SplitRng& rng, double lo = 0.5, double hi = 3.0) {
    Eigen::MatrixXd raw(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) raw(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd eig(n);
    for (int i = 0; i < n; ++i) eig(i) = lo + (hi - lo) * rng.uniform01();
    return q * eig.asDiagonal() * q.transpose();
}

inline Eigen::MatrixXd random_matrix(int n, SplitRng& rng, double scale = 1.0) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * rng.normal();
    return m;
}

}  // namespace testfix
