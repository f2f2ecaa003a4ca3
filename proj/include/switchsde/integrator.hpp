#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "switchsde/delay.hpp"
#include "switchsde/errors.hpp"
#include "switchsde/model.hpp"
#include "switchsde/switching.hpp"

namespace switchsde {

/// Initial history phi on [-tau_b, 0]: a constant vector or linear
/// interpolation of samples.
class InitialSegment {
public:
    static InitialSegment constant(Eigen::VectorXd value);
    static InitialSegment sampled(std::vector<double> times, std::vector<Eigen::VectorXd> values);

    Eigen::VectorXd eval(double theta) const;  // theta <= 0
    int dim() const;
    bool is_constant() const { return times_.empty(); }

private:
    InitialSegment() = default;
    Eigen::VectorXd constant_;
    std::vector<double> times_;  // increasing, last one 0
    std::vector<Eigen::VectorXd> values_;
};

/// General switched drift/diffusion pair for the simulated system.
struct GeneralSds {
    int n = 0;
    int noise_width = 1;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, ModeId, double)> drift;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&, ModeId, double)> diffusion;

    static GeneralSds from(const SwitchedNetworkModel& model);
};

/// Stored state history plus the initial segment; delayed-state reads use
/// linear interpolation between grid points (exact at grid points).
class History {
public:
    History(const InitialSegment* init, double tau_b);
    void append(double t, const Eigen::VectorXd& x);
    Eigen::VectorXd at(double t) const;
    std::size_t size() const { return times_.size(); }

private:
    const InitialSegment* init_;
    double tau_b_;
    std::vector<double> times_;
    std::vector<Eigen::VectorXd> states_;
};

/// One realized solution on the refined grid: the uniform h-grid with every
/// switch instant inserted, so each Euler-Maruyama step runs under a single
/// mode (the post-jump mode at the step's left endpoint).
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<ModeId> modes;
    std::uint64_t seed = 0;

    Eigen::VectorXd state_at(double t, const InitialSegment* init = nullptr,
                             double tau_b = 0.0) const;
    std::size_t index_of(double t) const;  // exact grid point lookup

    /// CSV with header t,mode,x1,...,xn; 17 significant digits.
    void write_csv(std::ostream& os) const;
};

Trajectory integrate(const GeneralSds& sds, const SwitchingPath& path, const DelayFunction& delay,
                     const InitialSegment& init, double h, double horizon, std::uint64_t seed);
Trajectory integrate_stream(const GeneralSds& sds, const SwitchingPath& path,
                            const DelayFunction& delay, const InitialSegment& init, double h,
                            double horizon, std::uint64_t seed, std::uint64_t stream);

Trajectory integrate(const SwitchedNetworkModel& model, const SwitchingPath& path,
                     const DelayFunction& delay, const InitialSegment& init, double h,
                     double horizon, std::uint64_t seed);

/// The refined time grid used by integrate: uniform steps of size h on
/// [0, horizon] with the path's switch instants inserted.
std::vector<double> refined_grid(double h, double horizon, const SwitchingPath& path);

}  // namespace switchsde
