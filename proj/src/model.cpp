#include "switchsde/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace switchsde {

Nonlinearity Nonlinearity::tanh(int n) {
    Nonlinearity nl;
    nl.kind = Kind::Tanh;
    nl.g = [](int, double x) { return std::tanh(x); };
    nl.gprime = [](int, double x) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
    };
    // \int_0^x tanh = log cosh x, written to avoid overflow for large |x|.
    nl.gintegral = [](int, double x) {
        const double ax = std::abs(x);
        return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
    };
    nl.G = Eigen::VectorXd::Ones(n);
    return nl;
}

Nonlinearity Nonlinearity::linear(int n) {
    Nonlinearity nl;
    nl.kind = Kind::Linear;
    nl.g = [](int, double x) { return x; };
    nl.gprime = [](int, double) { return 1.0; };
    nl.gintegral = [](int, double x) { return 0.5 * x * x; };
    nl.G = Eigen::VectorXd::Ones(n);
    return nl;
}

NoiseSpec NoiseSpec::zero() {
    NoiseSpec s;
    s.kind = Kind::Zero;
    return s;
}

NoiseSpec NoiseSpec::delayed_output() {
    NoiseSpec s;
    s.kind = Kind::DelayedOutput;
    return s;
}

NoiseSpec NoiseSpec::linear_mix(std::vector<Eigen::MatrixXd> C1, std::vector<Eigen::MatrixXd> C2) {
    if (C1.size() != C2.size() || C1.empty())
        throw ConfigError("linear_mix noise: C1 and C2 must cover the same non-empty mode set");
    NoiseSpec s;
    s.kind = Kind::LinearMix;
    s.C1 = std::move(C1);
    s.C2 = std::move(C2);
    return s;
}

Eigen::MatrixXd NoiseSpec::eval(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                ModeId mode) const {
    switch (kind) {
        case Kind::Zero:
            return Eigen::MatrixXd::Zero(u.size(), 1);
        case Kind::DelayedOutput:
            return v;
        case Kind::LinearMix: {
            const auto idx = static_cast<std::size_t>(mode);
            if (idx >= C1.size()) throw ConfigError("linear_mix noise: mode out of range");
            return C1[idx] * u + C2[idx] * v;
        }
        case Kind::Custom:
            if (!fn) throw ConfigError("custom noise: missing evaluation function");
            return fn(u, v, mode);
    }
    return Eigen::MatrixXd::Zero(u.size(), 1);
}

int NoiseSpec::width() const {
    return kind == Kind::Custom ? custom_width : 1;
}

void SwitchedNetworkModel::validate_shapes() const {
    if (n <= 0) throw ConfigError("model: state dimension must be positive");
    const std::size_t modes = D.size();
    if (modes == 0) throw ConfigError("model: at least one mode required");
    if (A.size() != modes || B.size() != modes)
        throw ConfigError("model: D, A, B must cover the same mode set");
    if (a.size() != modes || E.size() != modes || F.size() != modes)
        throw ConfigError("model: noise-bound data a, E, F must cover every mode");
    for (std::size_t k = 0; k < modes; ++k) {
        const auto square_n = [&](const Eigen::MatrixXd& m, const char* name) {
            if (m.rows() != n || m.cols() != n)
                throw ConfigError(std::string("model: ") + name + " of mode " + std::to_string(k) +
                                  " is not " + std::to_string(n) + "x" + std::to_string(n));
        };
        square_n(D[k], "D");
        square_n(A[k], "A");
        square_n(B[k], "B");
        square_n(E[k], "E");
        square_n(F[k], "F");
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                if (i != j && D[k](i, j) != 0.0)
                    throw ConfigError("model: D of mode " + std::to_string(k) + " must be diagonal");
            if (!(D[k](i, i) > 0.0))
                throw ConfigError("model: D of mode " + std::to_string(k) +
                                  " must have strictly positive diagonal");
        }
        if (!(a[k] > 0.0))
            throw ConfigError("model: noise bound a of mode " + std::to_string(k) + " must be positive");
    }
    if (nonlinearity.G.size() != n)
        throw ConfigError("model: nonlinearity bounds G must have length n");
    for (int i = 0; i < n; ++i)
        if (!(nonlinearity.G(i) > 0.0))
            throw ConfigError("model: every G_i must be strictly positive");
    if (noise.kind == NoiseSpec::Kind::LinearMix && noise.C1.size() != modes)
        throw ConfigError("model: linear_mix noise must cover every mode");
}

Eigen::VectorXd SwitchedNetworkModel::g(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(x.size());
    for (int i = 0; i < x.size(); ++i) out(i) = nonlinearity.g(i, x(i));
    return out;
}

Eigen::VectorXd SwitchedNetworkModel::gprime(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(x.size());
    for (int i = 0; i < x.size(); ++i) out(i) = nonlinearity.gprime(i, x(i));
    return out;
}

double SwitchedNetworkModel::gintegral_sum(const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) sum += z(i) * nonlinearity.gintegral(i, x(i));
    return sum;
}

Eigen::VectorXd SwitchedNetworkModel::drift(const Eigen::VectorXd& x, const Eigen::VectorXd& xdel,
                                            ModeId mode) const {
    const auto k = static_cast<std::size_t>(mode);
    if (k >= D.size()) throw ConfigError("model: mode " + std::to_string(mode) + " out of range");
    return -D[k] * x + A[k] * g(x) + B[k] * g(xdel);
}

Eigen::MatrixXd SwitchedNetworkModel::sigma(const Eigen::VectorXd& x, const Eigen::VectorXd& xdel,
                                            ModeId mode) const {
    return noise.eval(g(x), g(xdel), mode);
}

namespace {

Eigen::VectorXd sample_in_ball(int n, double radius, SplitRng& rng) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    const double norm = z.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(n);
    const double r = radius * std::pow(rng.uniform01(), 1.0 / n);
    return z * (r / norm);
}

}  // namespace

HypothesisReport validate_hypotheses(const SwitchedNetworkModel& m, int sample_count,
                                     double radius, std::uint64_t seed,
                                     const std::vector<Eigen::MatrixXd>* P) {
    if (sample_count < 1) throw ConfigError("validate_hypotheses: sample_count must be >= 1");
    if (!(radius > 0.0)) throw ConfigError("validate_hypotheses: radius must be positive");
    m.validate_shapes();
    if (P != nullptr && P->size() != static_cast<std::size_t>(m.mode_count()))
        throw ConfigError("validate_hypotheses: P family must cover every mode");

    HypothesisReport report;

    // H2 on a 1-D grid: g_i(0) = 0 and 0 <= g_i' <= G_i.
    constexpr int kSlopeGrid = 201;
    for (int i = 0; i < m.n; ++i) {
        if (std::abs(m.nonlinearity.g(i, 0.0)) > 1e-12) report.g_zero_ok = false;
        for (int j = 0; j < kSlopeGrid; ++j) {
            const double x = -radius + 2.0 * radius * j / (kSlopeGrid - 1);
            const double slope = m.nonlinearity.gprime(i, x);
            const double excess = std::max(slope - m.nonlinearity.G(i), -slope);
            if (excess > report.worst_slope) {
                report.worst_slope = excess;
                report.worst_slope_x = x;
            }
            if (slope < -1e-12 || slope > m.nonlinearity.G(i) + 1e-12) report.g_slope_ok = false;
        }
    }

    report.min_slack_h32 = std::numeric_limits<double>::infinity();
    report.min_slack_h33 = std::numeric_limits<double>::infinity();
    report.h33_checked = P != nullptr;

    SplitRng rng(seed, 0);
    const double tol = 1e-9;
    for (ModeId mode = 0; mode < m.mode_count(); ++mode) {
        const auto k = static_cast<std::size_t>(mode);
        for (int s = 0; s < sample_count; ++s) {
            const Eigen::VectorXd u = sample_in_ball(m.n, radius, rng);
            const Eigen::VectorXd v = sample_in_ball(m.n, radius, rng);
            const Eigen::MatrixXd sig = m.noise.eval(u, v, mode);

            const double lhs2 = (sig.transpose() * sig).trace();
            const double rhs2 = u.dot(m.E[k] * u) + v.dot(m.F[k] * v);
            report.min_slack_h32 = std::min(report.min_slack_h32, rhs2 - lhs2);
            if (lhs2 > rhs2 + tol * std::max(1.0, std::abs(rhs2))) {
                report.h32_ok = false;
                if (report.violations.size() < 8)
                    report.violations.push_back({u, v, mode, lhs2, rhs2, "H3-2"});
            }

            if (P != nullptr) {
                const Eigen::MatrixXd& pk = (*P)[k];
                const double lhs3 = (sig.transpose() * pk * sig).trace();
                const double rhs3 = m.a[k] * (u.dot(pk * u) + v.dot(pk * v));
                report.min_slack_h33 = std::min(report.min_slack_h33, rhs3 - lhs3);
                if (lhs3 > rhs3 + tol * std::max(1.0, std::abs(rhs3))) {
                    report.h33_ok = false;
                    if (report.violations.size() < 8)
                        report.violations.push_back({u, v, mode, lhs3, rhs3, "H3-3"});
                }
            }
        }
    }

    report.pass = report.g_zero_ok && report.g_slope_ok && report.h32_ok && report.h33_ok;
    if (!report.g_zero_ok)
        report.message = "H2 violated: g(0) != 0";
    else if (!report.g_slope_ok)
        report.message = "H2 violated: g' outside [0, G]";
    else if (!report.h32_ok)
        report.message = "H3-(2) trace bound violated";
    else if (!report.h33_ok)
        report.message = "H3-(3) trace bound violated";
    else
        report.message = "ok";
    return report;
}

}  // namespace switchsde
