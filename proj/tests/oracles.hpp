#pragma once

// Independent verification oracles shared by the unit and acceptance suites:
// an entry-by-entry Pi assembly (plain index loops) and closed-form
// characteristic-polynomial eigenvalues for symmetric matrices up to 3x3.
// Both stay deliberately independent of the library's assembly and solver
// paths.

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "switchsde/certificates.hpp"

namespace testfix {

struct RandomInstance {
    SwitchedNetworkModel model;
    CertificateThm4 cert;
    std::vector<std::vector<double>> dists;  // per-mode iid conditional laws
    RateMap rates;
};

inline RandomInstance random_instance(SplitRng& rng) {
    const int n = 1 + static_cast<int>(rng.uniform01() * 4.0);      // 1..4
    const int modes = 2 + static_cast<int>(rng.uniform01() * 2.0);  // 2..3

    RandomInstance inst;
    inst.model.n = n;
    inst.model.nonlinearity = Nonlinearity::tanh(n);
    for (int i = 0; i < n; ++i) inst.model.nonlinearity.G(i) = 0.5 + 2.0 * rng.uniform01();
    inst.model.noise = NoiseSpec::delayed_output();
    for (int k = 0; k < modes; ++k) {
        Eigen::VectorXd d(n);
        for (int i = 0; i < n; ++i) d(i) = 0.2 + 3.0 * rng.uniform01();
        inst.model.D.push_back(d.asDiagonal());
        inst.model.A.push_back(random_matrix(n, rng));
        inst.model.B.push_back(random_matrix(n, rng));
        inst.model.a.push_back(0.1 + rng.uniform01());
        inst.model.E.push_back(random_spd(n, rng, 0.0, 1.0));
        inst.model.F.push_back(random_spd(n, rng, 0.0, 1.0));
        inst.cert.P.push_back(random_spd(n, rng));
        inst.cert.R.push_back(random_spd(n, rng, 0.1, 2.0));
        std::vector<double> dist(static_cast<std::size_t>(modes));
        double total = 0.0;
        for (double& p : dist) {
            p = 0.05 + rng.uniform01();
            total += p;
        }
        for (double& p : dist) p /= total;
        double sum = 0.0;
        for (double p : dist) sum += p;
        dist.back() += 1.0 - sum;  // exact row sum for the 1e-12 check
        inst.dists.push_back(dist);
        inst.rates.rates.push_back(0.3 + 2.0 * rng.uniform01());
    }
    inst.cert.Z.resize(n);
    for (int i = 0; i < n; ++i) inst.cert.Z(i) = 0.2 + rng.uniform01();
    inst.cert.Q = random_spd(n, rng, 0.2, 2.0);
    inst.cert.alpha_nu = 0.5 * rng.uniform01();
    inst.cert.beta_nu = 0.5 + 0.5 * rng.uniform01();
    inst.rates.mu0 = *std::max_element(inst.rates.rates.begin(), inst.rates.rates.end());
    return inst;
}

inline Eigen::MatrixXd elementwise_pi(const RandomInstance& inst, ModeId mode) {
    const int n = inst.model.n;
    const auto k = static_cast<std::size_t>(mode);
    const Eigen::MatrixXd& P = inst.cert.P[k];
    const Eigen::MatrixXd& R = inst.cert.R[k];
    const Eigen::MatrixXd& D = inst.model.D[k];
    const Eigen::MatrixXd& A = inst.model.A[k];
    const Eigen::MatrixXd& B = inst.model.B[k];
    const Eigen::VectorXd& G = inst.model.nonlinearity.G;
    const Eigen::VectorXd& Z = inst.cert.Z;
    const double a = inst.model.a[k];
    const double mu = inst.rates.rates[k];
    const std::vector<double>& dist = inst.dists[k];

    double lam_zg = Z(0) * G(0);
    for (int i = 1; i < n; ++i) lam_zg = std::max(lam_zg, Z(i) * G(i));

    Eigen::MatrixXd pi(3 * n, 3 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double chi = 0.0;
            for (std::size_t l = 0; l < dist.size(); ++l)
                chi += dist[l] * (inst.cert.P[l](i, j) - P(i, j));
            chi *= mu;
            const double zg = i == j ? Z(i) * G(i) : 0.0;
            pi(i, j) = inst.cert.alpha_nu * (P(i, j) + zg) -
                       (P(i, j) * D(j, j) + D(i, i) * P(i, j)) + R(i, j) + chi;

            double pa = 0.0, pb = 0.0;
            const double zb = Z(i) * B(i, j);
            for (int l = 0; l < n; ++l) {
                pa += P(i, l) * A(l, j);
                pb += P(i, l) * B(l, j);
            }
            pi(i, n + j) = pa;
            pi(n + j, i) = pa;
            pi(i, 2 * n + j) = pb;
            pi(2 * n + j, i) = pb;
            pi(n + i, 2 * n + j) = zb;
            pi(2 * n + j, n + i) = zb;

            const double zd = i == j ? -2.0 * Z(i) * D(i, i) / G(i) : 0.0;
            pi(n + i, n + j) = zd + Z(i) * A(i, j) + A(j, i) * Z(j) - R(i, j) / (G(i) * G(j)) +
                               a * P(i, j) + inst.cert.Q(i, j) + lam_zg * inst.model.E[k](i, j);
            pi(2 * n + i, 2 * n + j) = -inst.cert.beta_nu * inst.cert.Q(i, j) + a * P(i, j) +
                                       lam_zg * inst.model.F[k](i, j);
        }
    }
    return 0.5 * (pi + pi.transpose());
}

inline std::vector<double> charpoly_eigenvalues(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    std::vector<double> roots;
    if (n == 1) {
        roots = {m(0, 0)};
    } else if (n == 2) {
        const double tr = m(0, 0) + m(1, 1);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
        roots = {tr / 2.0 - disc, tr / 2.0 + disc};
    } else {
        const double c2 = m.trace();
        const double c1 = 0.5 * (c2 * c2 - (m * m).trace());
        const double c0 = m.determinant();
        // Depressed cubic t^3 + p t + q via lambda = t + c2 / 3; symmetric
        // input guarantees three real roots (trigonometric form).
        const double p = c1 - c2 * c2 / 3.0;
        const double q = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
        const double shift = c2 / 3.0;
        if (std::abs(p) < 1e-300) {
            const double t = std::cbrt(-q);
            roots = {t + shift, t + shift, t + shift};
        } else {
            const double r = std::sqrt(-4.0 * p / 3.0);
            double arg = 3.0 * q / (p * r);
            arg = std::clamp(arg, -1.0, 1.0);
            const double phi = std::acos(arg) / 3.0;
            constexpr double two_pi_over_3 = 2.0943951023931953;
            roots = {r * std::cos(phi) + shift, r * std::cos(phi - two_pi_over_3) + shift,
                     r * std::cos(phi - 2.0 * two_pi_over_3) + shift};
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace testfix
