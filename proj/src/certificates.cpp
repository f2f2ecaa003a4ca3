#include "switchsde/certificates.hpp"

#include <algorithm>
#include <cmath>

namespace switchsde {

namespace {

constexpr double kAsymmetryTolerance = 1e-12;
constexpr double kRelativeSlack = 1e-9;

void require_symmetric(const Eigen::MatrixXd& m, double rel_tol, const std::string& name) {
    if (m.rows() != m.cols()) throw std::invalid_argument(name + ": matrix is not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > rel_tol * scale)
        throw std::invalid_argument(name + ": matrix is asymmetric beyond tolerance (" +
                                    std::to_string(asym / scale) + " relative)");
}

void require_spd(const Eigen::MatrixXd& m, const std::string& name) {
    require_symmetric(m, 1e-10, name);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw CertificateError(name + ": eigensolve failed");
    if (solver.eigenvalues().minCoeff() <= 0.0)
        throw CertificateError(name + ": not positive definite (min eigenvalue " +
                               std::to_string(solver.eigenvalues().minCoeff()) + ")");
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double spectral_norm_sym(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// chi for an exact conditional law, grouped as mu * sum_j p_j (P_j - P_cur)
// so that identity transitions and constant P families give the exact zero.
Eigen::MatrixXd chi_from_distribution(const std::vector<double>& probs,
                                      const std::vector<Eigen::MatrixXd>& P, ModeId current,
                                      double mu) {
    const auto cur = static_cast<std::size_t>(current);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(P[cur].rows(), P[cur].cols());
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (probs[j] == 0.0) continue;
        if (j >= P.size()) throw ConfigError("chi term: P family does not cover mode " + std::to_string(j));
        acc += probs[j] * (P[j] - P[cur]);
    }
    return mu * acc;
}

ChiTerm walk_bound_chi(const std::vector<Eigen::MatrixXd>& P, const RateMap& rates) {
    if (P.size() != 2)
        throw ConfigError("reflected-max walk certificates need exactly two modes");
    // The imposed Loewner precondition P(0) >= P(1); without it the paper's
    // bound chi <= (1/2) mu(1) (P(0) - P(1)) does not dominate the true term.
    const Eigen::MatrixXd gap = P[0] - P[1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(gap), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, P[0].cwiseAbs().maxCoeff());
    if (solver.eigenvalues().minCoeff() < -kRelativeSlack * scale)
        throw CertificateError(
            "reflected-max walk bound requires P(0) >= P(1) in the Loewner order");
    ChiTerm chi;
    chi.value = 0.5 * rates.rate(1) * gap;
    chi.is_bound = true;
    return chi;
}

void check_p_family(const std::vector<Eigen::MatrixXd>& P, int modes) {
    if (static_cast<int>(P.size()) < modes)
        throw ConfigError("chi term: P family covers " + std::to_string(P.size()) +
                          " modes, family needs " + std::to_string(modes));
}

}  // namespace

double lambda_max_sym(const Eigen::MatrixXd& s, Eigen::VectorXd* witness) {
    if (s.rows() == 0) throw ConfigError("lambda_max: empty matrix");
    require_symmetric(s, 1e-10, "lambda_max");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        symmetrized(s), witness != nullptr ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolve failed");
    const Eigen::Index last = solver.eigenvalues().size() - 1;
    if (witness != nullptr) *witness = solver.eigenvectors().col(last);
    return solver.eigenvalues()(last);
}

SemidefReport loewner_leq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tolerance) {
    require_symmetric(a, 1e-10, "loewner_leq lhs");
    require_symmetric(b, 1e-10, "loewner_leq rhs");
    if (a.rows() != b.rows()) throw std::invalid_argument("loewner_leq: size mismatch");
    SemidefReport report;
    report.lambda_max = lambda_max_sym(symmetrized(a) - symmetrized(b), &report.witness);
    report.tolerance = tolerance;
    report.pass = report.lambda_max <= tolerance;
    return report;
}

ChiTerm chi_term(const SwitchingFamily& family, const std::vector<Eigen::MatrixXd>& P,
                 ModeId current_mode, const RateMap& rates) {
    validate_family(family);
    const int modes = family_mode_count(family);
    check_p_family(P, modes);
    if (current_mode < 0 || current_mode >= modes)
        throw ConfigError("chi term: mode " + std::to_string(current_mode) + " out of range");
    const double mu = rates.rate(current_mode);

    if (const auto* iid = std::get_if<IndependentIid>(&family))
        return {chi_from_distribution(iid->dist, P, current_mode, mu), false};

    if (const auto* fm = std::get_if<FiniteMarkov>(&family)) {
        std::vector<double> row(static_cast<std::size_t>(fm->transition.cols()));
        for (Eigen::Index j = 0; j < fm->transition.cols(); ++j)
            row[static_cast<std::size_t>(j)] = fm->transition(current_mode, j);
        return {chi_from_distribution(row, P, current_mode, mu), false};
    }

    if (std::holds_alternative<ReflectedMaxWalk>(family)) {
        if (current_mode == 0) {
            // On the maximum the successor is exactly equiprobable.
            return {chi_from_distribution({0.5, 0.5}, P, 0, mu), false};
        }
        return walk_bound_chi(P, rates);
    }

    if (std::holds_alternative<HiddenMarkov>(family))
        throw ConfigError(
            "chi term for a hidden Markov family depends on the hidden state; "
            "use chi_classes, which enumerates (hidden, mode) pairs");

    throw ConfigError(
        "chi term for a fixed sequence depends on the position; use chi_classes");
}

std::vector<ChiClass> chi_classes(const SwitchingFamily& family,
                                  const std::vector<Eigen::MatrixXd>& P, const RateMap& rates) {
    validate_family(family);
    const int modes = family_mode_count(family);
    check_p_family(P, modes);
    std::vector<ChiClass> classes;

    if (std::holds_alternative<IndependentIid>(family) ||
        std::holds_alternative<FiniteMarkov>(family)) {
        for (ModeId m = 0; m < modes; ++m)
            classes.push_back({m, chi_term(family, P, m, rates), "mode " + std::to_string(m)});
        return classes;
    }

    if (std::holds_alternative<ReflectedMaxWalk>(family)) {
        classes.push_back({0, chi_term(family, P, 0, rates), "mode 0"});
        classes.push_back({1, chi_term(family, P, 1, rates), "mode 1 (conservative bound)"});
        return classes;
    }

    if (const auto* hm = std::get_if<HiddenMarkov>(&family)) {
        // One class per co-occurring (hidden, mode) pair: the hidden state
        // fixes the conditional law, the mode fixes the subsystem matrices.
        for (int z = 0; z < hm->hidden_transition.rows(); ++z) {
            const Eigen::RowVectorXd marginal = hm->hidden_transition.row(z) * hm->emission;
            const std::vector<double> probs(marginal.data(), marginal.data() + marginal.size());
            for (ModeId m = 0; m < modes; ++m) {
                if (hm->emission(z, m) == 0.0) continue;
                classes.push_back({m,
                                   {chi_from_distribution(probs, P, m, rates.rate(m)), false},
                                   "hidden " + std::to_string(z) + ", mode " + std::to_string(m)});
            }
        }
        if (classes.empty()) throw ConfigError("hidden markov family emits no modes");
        return classes;
    }

    const auto& fs = std::get<FixedSequence>(family);
    for (std::size_t k = 0; k + 1 < fs.modes.size(); ++k) {
        std::vector<double> probs(static_cast<std::size_t>(modes), 0.0);
        probs[static_cast<std::size_t>(fs.modes[k + 1])] = 1.0;
        classes.push_back({fs.modes[k],
                           {chi_from_distribution(probs, P, fs.modes[k], rates.rate(fs.modes[k])), false},
                           "position " + std::to_string(k)});
    }
    // Exhausted tail: the sequence sits at its last mode forever, chi = 0.
    const ModeId last = fs.modes.back();
    classes.push_back({last,
                       {Eigen::MatrixXd::Zero(P[0].rows(), P[0].cols()), false},
                       "position " + std::to_string(fs.modes.size() - 1) + " (terminal)"});
    return classes;
}

void CertificateThm4::validate(const SwitchedNetworkModel& model) const {
    const auto modes = static_cast<std::size_t>(model.mode_count());
    if (P.size() != modes || R.size() != modes)
        throw CertificateError("thm4 certificate: P and R must cover every mode");
    if (Z.size() != model.n) throw CertificateError("thm4 certificate: Z must have length n");
    for (int i = 0; i < model.n; ++i)
        if (!(Z(i) > 0.0)) throw CertificateError("thm4 certificate: Z must be positive diagonal");
    require_spd(Q, "thm4 certificate Q");
    for (std::size_t k = 0; k < modes; ++k) {
        require_spd(P[k], "thm4 certificate P(" + std::to_string(k) + ")");
        require_spd(R[k], "thm4 certificate R(" + std::to_string(k) + ")");
        if (P[k].rows() != model.n || R[k].rows() != model.n)
            throw CertificateError("thm4 certificate: P/R dimension mismatch with the model");
    }
    if (Q.rows() != model.n) throw CertificateError("thm4 certificate: Q dimension mismatch");
    if (!(beta_nu > 0.0)) throw CertificateError("thm4 certificate: beta_nu must be positive");
}

void CertificateThm5::validate(const SwitchedNetworkModel& model) const {
    const auto modes = static_cast<std::size_t>(model.mode_count());
    if (P.size() != modes || V.size() != modes || W.size() != modes)
        throw CertificateError("thm5 certificate: P, V, W must cover every mode");
    for (std::size_t k = 0; k < modes; ++k) {
        require_spd(P[k], "thm5 certificate P(" + std::to_string(k) + ")");
        if (P[k].rows() != model.n)
            throw CertificateError("thm5 certificate: P dimension mismatch with the model");
        if (V[k].size() != model.n || W[k].size() != model.n)
            throw CertificateError("thm5 certificate: V/W must have length n");
        for (int i = 0; i < model.n; ++i) {
            if (V[k](i) == 0.0 || W[k](i) == 0.0)
                throw CertificateError("thm5 certificate: singular V or W diagonal");
            if (V[k](i) < 0.0 || W[k](i) < 0.0)
                throw CertificateError("thm5 certificate: V and W must be positive diagonal");
        }
    }
    if (!(kappa > kappa_prime) || !(kappa_prime > 0.0))
        throw CertificateError("thm5 certificate: need kappa > kappa' > 0");
    if (!(rho1 >= 1.0)) throw CertificateError("thm5 certificate: rho1 must be >= 1");
    if (!(beta_nu > 0.0)) throw CertificateError("thm5 certificate: beta_nu must be positive");
}

Eigen::MatrixXd build_pi(const SwitchedNetworkModel& model, const CertificateThm4& cert,
                         const ChiTerm& chi, ModeId mode) {
    model.validate_shapes();
    cert.validate(model);
    const int n = model.n;
    const auto k = static_cast<std::size_t>(mode);
    if (k >= model.D.size()) throw ConfigError("build_pi: mode out of range");

    const Eigen::MatrixXd& P = cert.P[k];
    const Eigen::MatrixXd& R = cert.R[k];
    const Eigen::MatrixXd& D = model.D[k];
    const Eigen::MatrixXd& A = model.A[k];
    const Eigen::MatrixXd& B = model.B[k];
    const Eigen::VectorXd& G = model.nonlinearity.G;
    const Eigen::VectorXd Ginv = G.cwiseInverse();
    const double a = model.a[k];
    const double lambda_zg = (cert.Z.array() * G.array()).maxCoeff();
    const Eigen::MatrixXd ZG = (cert.Z.array() * G.array()).matrix().asDiagonal();
    const Eigen::MatrixXd Zd = cert.Z.asDiagonal();

    const Eigen::MatrixXd ZDGinv =
        (cert.Z.array() * D.diagonal().array() * Ginv.array()).matrix().asDiagonal();
    const Eigen::MatrixXd GinvRGinv = Ginv.asDiagonal() * R * Ginv.asDiagonal();

    const Eigen::MatrixXd sigma_block =
        cert.alpha_nu * (P + ZG) - (P * D + D * P) + R + chi.value;
    const Eigen::MatrixXd lambda_block = -2.0 * ZDGinv + Zd * A + A.transpose() * Zd -
                                         GinvRGinv + a * P + cert.Q + lambda_zg * model.E[k];
    const Eigen::MatrixXd gamma_block = -cert.beta_nu * cert.Q + a * P + lambda_zg * model.F[k];

    Eigen::MatrixXd pi(3 * n, 3 * n);
    pi.block(0, 0, n, n) = sigma_block;
    pi.block(0, n, n, n) = P * A;
    pi.block(0, 2 * n, n, n) = P * B;
    pi.block(n, 0, n, n) = (P * A).transpose();
    pi.block(n, n, n, n) = lambda_block;
    pi.block(n, 2 * n, n, n) = Zd * B;
    pi.block(2 * n, 0, n, n) = (P * B).transpose();
    pi.block(2 * n, n, n, n) = (Zd * B).transpose();
    pi.block(2 * n, 2 * n, n, n) = gamma_block;

    require_symmetric(pi, kAsymmetryTolerance, "build_pi");
    return symmetrized(pi);
}

Eigen::MatrixXd build_pi(const SwitchedNetworkModel& model, const CertificateThm4& cert,
                         const SwitchingFamily& family, const RateMap& rates, ModeId mode) {
    return build_pi(model, cert, chi_term(family, cert.P, mode, rates), mode);
}

namespace {

CheckResult run_semidef_checks(const std::vector<std::pair<std::string, Eigen::MatrixXd>>& tests,
                               double tolerance, bool conservative) {
    CheckResult result;
    result.conservative = conservative;
    result.pass = true;
    bool first = true;
    for (const auto& [label, matrix] : tests) {
        SemidefReport report;
        report.label = label;
        report.lambda_max = lambda_max_sym(matrix, &report.witness);
        report.tolerance = tolerance + kRelativeSlack * spectral_norm_sym(matrix);
        report.pass = report.lambda_max <= report.tolerance;
        result.pass = result.pass && report.pass;
        if (first || report.lambda_max > result.worst_lambda_max) {
            result.worst_lambda_max = report.lambda_max;
            result.worst_label = label;
            first = false;
        }
        result.reports.push_back(std::move(report));
    }
    return result;
}

}  // namespace

CheckResult check_thm4(const SwitchedNetworkModel& model, const CertificateThm4& cert,
                       const SwitchingFamily& family, const RateMap& rates, double tolerance) {
    model.validate_shapes();
    cert.validate(model);
    std::vector<std::pair<std::string, Eigen::MatrixXd>> tests;
    bool conservative = false;
    for (const ChiClass& cls : chi_classes(family, cert.P, rates)) {
        conservative = conservative || cls.chi.is_bound;
        tests.emplace_back("Pi[" + cls.label + "]", build_pi(model, cert, cls.chi, cls.mode));
    }
    return run_semidef_checks(tests, tolerance, conservative);
}

MnPair build_mn(const SwitchedNetworkModel& model, const CertificateThm5& cert,
                const ChiTerm& chi, ModeId mode) {
    model.validate_shapes();
    cert.validate(model);
    const auto k = static_cast<std::size_t>(mode);
    if (k >= model.D.size()) throw ConfigError("build_mn: mode out of range");

    const Eigen::MatrixXd& P = cert.P[k];
    const Eigen::MatrixXd& D = model.D[k];
    const Eigen::MatrixXd& A = model.A[k];
    const Eigen::MatrixXd& B = model.B[k];
    const Eigen::VectorXd& G = model.nonlinearity.G;
    const double a = model.a[k];
    const double p_norm = spectral_norm_sym(P);
    const Eigen::MatrixXd G2 = (G.array() * G.array()).matrix().asDiagonal();
    const Eigen::MatrixXd GVG = (G.array() * cert.V[k].array() * G.array()).matrix().asDiagonal();
    const Eigen::MatrixXd GWG = (G.array() * cert.W[k].array() * G.array()).matrix().asDiagonal();

    MnPair mn;
    mn.M = cert.alpha_nu * P - (P * D + D * P) + a * p_norm * G2 +
           P * A * cert.V[k].cwiseInverse().asDiagonal() * A.transpose() * P + GVG +
           P * B * cert.W[k].cwiseInverse().asDiagonal() * B.transpose() * P + chi.value;
    mn.N = cert.beta_nu * (GWG + a * p_norm * G2);

    require_symmetric(mn.M, kAsymmetryTolerance, "build_mn M");
    require_symmetric(mn.N, kAsymmetryTolerance, "build_mn N");
    mn.M = symmetrized(mn.M);
    mn.N = symmetrized(mn.N);
    return mn;
}

MnPair build_mn(const SwitchedNetworkModel& model, const CertificateThm5& cert,
                const SwitchingFamily& family, const RateMap& rates, ModeId mode) {
    return build_mn(model, cert, chi_term(family, cert.P, mode, rates), mode);
}

CheckResult check_thm5(const SwitchedNetworkModel& model, const CertificateThm5& cert,
                       const SwitchingFamily& family, const RateMap& rates, double tolerance) {
    model.validate_shapes();
    cert.validate(model);  // kappa > kappa' enforced before any eigensolve

    std::vector<std::pair<std::string, Eigen::MatrixXd>> tests;
    bool conservative = false;
    for (const ChiClass& cls : chi_classes(family, cert.P, rates)) {
        conservative = conservative || cls.chi.is_bound;
        const auto k = static_cast<std::size_t>(cls.mode);
        const MnPair mn = build_mn(model, cert, cls.chi, cls.mode);
        tests.emplace_back("M[" + cls.label + "] + kappa P", mn.M + cert.kappa * cert.P[k]);
        tests.emplace_back("N[" + cls.label + "] - (kappa'/rho1) P",
                           mn.N - (cert.kappa_prime / cert.rho1) * cert.P[k]);
    }
    const int modes = model.mode_count();
    for (ModeId i = 0; i < modes; ++i)
        for (ModeId j = 0; j < modes; ++j)
            tests.emplace_back(
                "P(" + std::to_string(i) + ") - rho1 P(" + std::to_string(j) + ")",
                (cert.P[static_cast<std::size_t>(i)] - cert.rho1 * cert.P[static_cast<std::size_t>(j)])
                    .eval());
    return run_semidef_checks(tests, tolerance, conservative);
}

}  // namespace switchsde
