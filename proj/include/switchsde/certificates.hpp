#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchsde/errors.hpp"
#include "switchsde/model.hpp"
#include "switchsde/switching.hpp"

namespace switchsde {

/// Theorem-4 certificate data: per-mode P(xi) and R(xi) (symmetric positive
/// definite), a positive diagonal Z, a symmetric positive definite Q, and
/// the nu constants alpha_nu, beta_nu (the inf-variant of beta).
struct CertificateThm4 {
    std::vector<Eigen::MatrixXd> P;
    Eigen::VectorXd Z;
    Eigen::MatrixXd Q;
    std::vector<Eigen::MatrixXd> R;
    double alpha_nu = 0.0;
    double beta_nu = 0.0;

    void validate(const SwitchedNetworkModel& model) const;
};

/// Theorem-5 certificate data: per-mode P(xi) plus positive diagonal
/// V(xi), W(xi), the constants rho1 >= 1 and kappa > kappa' > 0, and the
/// nu constants (here beta_nu is the sup-variant ratio bound).
struct CertificateThm5 {
    std::vector<Eigen::MatrixXd> P;
    std::vector<Eigen::VectorXd> V, W;
    double rho1 = 1.0;
    double kappa = 0.0;
    double kappa_prime = 0.0;
    double alpha_nu = 0.0;
    double beta_nu = 0.0;

    void validate(const SwitchedNetworkModel& model) const;
};

/// Verdict carrier for one semidefiniteness test: pass iff
/// lambda_max <= tolerance (the stored tolerance already includes the
/// relative floating-point slack).
struct SemidefReport {
    std::string label;
    double lambda_max = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    Eigen::VectorXd witness;
};

/// Largest eigenvalue of a symmetric matrix; optionally its eigenvector.
double lambda_max_sym(const Eigen::MatrixXd& s, Eigen::VectorXd* witness = nullptr);

/// A <= B in the Loewner order, decided through lambda_max(A - B).
/// Inputs must be symmetric to 1e-10 relative.
SemidefReport loewner_leq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double tolerance = 0.0);

/// The switching contribution mu(xi) { E[P(xi^{k+1}) | F_k] - P(xi^k) } of
/// the generator, as an n x n matrix acting on x. is_bound marks the
/// reflected-max-walk off-maximum case, where only the conservative upper
/// bound (1/2) mu(1) (P(0) - P(1)) is available and P(0) >= P(1) must hold.
struct ChiTerm {
    Eigen::MatrixXd value;
    bool is_bound = false;
};

ChiTerm chi_term(const SwitchingFamily& family, const std::vector<Eigen::MatrixXd>& P,
                 ModeId current_mode, const RateMap& rates);

/// One conditioning class of the certificate check: the mode fixes the
/// subsystem matrices and the chi term carries the conditional jump law.
/// Families whose conditional law depends on more than the mode (hidden
/// Markov, scripted sequences) contribute several classes per mode.
struct ChiClass {
    ModeId mode = 0;
    ChiTerm chi;
    std::string label;
};

std::vector<ChiClass> chi_classes(const SwitchingFamily& family,
                                  const std::vector<Eigen::MatrixXd>& P, const RateMap& rates);

/// Assembles the 3n x 3n Theorem-4 block matrix for one conditioning class.
/// Products between P and the diagonal D enter in their symmetrized form
/// (P D + D P), which is what the quadratic form sees; the assembled matrix
/// must then be symmetric to 1e-12 relative before the final (Pi + Pi')/2.
Eigen::MatrixXd build_pi(const SwitchedNetworkModel& model, const CertificateThm4& cert,
                         const ChiTerm& chi, ModeId mode);
Eigen::MatrixXd build_pi(const SwitchedNetworkModel& model, const CertificateThm4& cert,
                         const SwitchingFamily& family, const RateMap& rates, ModeId mode);

struct CheckResult {
    std::vector<SemidefReport> reports;
    bool pass = false;
    bool conservative = false;  // some class used the bound-only chi term
    double worst_lambda_max = 0.0;
    std::string worst_label;
};

/// Theorem-4 feasibility: lambda_max(Pi) <= tolerance for every class.
/// The effective tolerance adds a relative slack of 1e-9 * ||Pi||_2 to
/// absorb floating-point assembly noise.
CheckResult check_thm4(const SwitchedNetworkModel& model, const CertificateThm4& cert,
                       const SwitchingFamily& family, const RateMap& rates,
                       double tolerance = 0.0);

struct MnPair {
    Eigen::MatrixXd M, N;
};

/// Assembles the Theorem-5 pair (M_k, N_k) for one conditioning class.
MnPair build_mn(const SwitchedNetworkModel& model, const CertificateThm5& cert,
                const ChiTerm& chi, ModeId mode);
MnPair build_mn(const SwitchedNetworkModel& model, const CertificateThm5& cert,
                const SwitchingFamily& family, const RateMap& rates, ModeId mode);

/// Theorem-5 feasibility: M_k <= -kappa P, N_k <= (kappa'/rho1) P per class,
/// and P(xi) <= rho1 P(xi') for every ordered mode pair.
CheckResult check_thm5(const SwitchedNetworkModel& model, const CertificateThm5& cert,
                       const SwitchingFamily& family, const RateMap& rates,
                       double tolerance = 0.0);

}  // namespace switchsde
