#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "switchsde/ensemble.hpp"
#include "switchsde/halanay.hpp"
#include "switchsde/lyapunov.hpp"

using namespace switchsde;
using namespace testfix;

namespace {

Trajectory constant_trajectory(double value, int n, double h, double horizon) {
    Trajectory traj;
    const auto steps = static_cast<std::size_t>(std::llround(horizon / h));
    for (std::size_t j = 0; j <= steps; ++j) {
        traj.times.push_back(h * static_cast<double>(j));
        traj.states.push_back(Eigen::VectorXd::Constant(n, value));
        traj.modes.push_back(0);
    }
    return traj;
}

SwitchedNetworkModel scalar_model() {
    SwitchedNetworkModel m;
    m.n = 1;
    m.D = {Eigen::MatrixXd::Identity(1, 1)};
    m.A = {Eigen::MatrixXd::Zero(1, 1)};
    m.B = {Eigen::MatrixXd::Zero(1, 1)};
    m.nonlinearity = Nonlinearity::tanh(1);
    m.noise = NoiseSpec::zero();
    m.a = {1.0};
    m.E = {Eigen::MatrixXd::Zero(1, 1)};
    m.F = {Eigen::MatrixXd::Zero(1, 1)};
    return m;
}

LyapunovV1Spec scalar_spec(double p, double z, double q, NuFunction nu) {
    LyapunovV1Spec spec{{Eigen::MatrixXd::Constant(1, 1, p)},
                        Eigen::VectorXd::Constant(1, z),
                        Eigen::MatrixXd::Constant(1, 1, q),
                        std::move(nu)};
    return spec;
}

// Simpson quadrature oracle on [0, b].
double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    double sum = f(a) + f(b);
    const double h = (b - a) / intervals;
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("V1 at the equilibrium vanishes") {
    const SwitchedNetworkModel model = example_model();
    const LyapunovV1Spec spec =
        LyapunovV1Spec::from(example_certificate_constant(), NuFunction::exponential(0.01));
    const DelayFunction delay = DelayFunction::constant(1.0);
    const Trajectory traj = constant_trajectory(0.0, 2, 0.01, 2.0);
    const InitialSegment init = InitialSegment::constant(Eigen::VectorXd::Zero(2));
    for (double t : {0.0, 0.5, 2.0})
        CHECK(eval_V1(spec, model, delay, traj, init, t) == 0.0);
}

TEST_CASE("V1 pure quadratic part") {
    // P = 1, Z = 0, Q = 0, nu constant: V1(x = 2) = 4.
    const LyapunovV1Spec spec = scalar_spec(1.0, 0.0, 0.0, NuFunction::exponential(0.0));
    const SwitchedNetworkModel m = scalar_model();
    const DelayFunction delay = DelayFunction::constant(1.0);
    const Trajectory traj = constant_trajectory(2.0, 1, 0.01, 1.0);
    const InitialSegment init = InitialSegment::constant(Eigen::VectorXd::Constant(1, 2.0));
    CHECK(eval_V1(spec, m, delay, traj, init, 0.5) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("V1 nonlinearity integral: 2 Z log cosh against a quadrature oracle") {
    const LyapunovV1Spec spec = scalar_spec(0.0, 1.0, 0.0, NuFunction::exponential(0.0));
    const SwitchedNetworkModel m = scalar_model();
    const DelayFunction delay = DelayFunction::constant(1.0);
    const Trajectory traj = constant_trajectory(1.0, 1, 0.01, 1.0);
    const InitialSegment init = InitialSegment::constant(Eigen::VectorXd::Ones(1));
    const double value = eval_V1(spec, m, delay, traj, init, 1.0);
    const double oracle = 2.0 * simpson([](double s) { return std::tanh(s); }, 0.0, 1.0, 2000);
    CHECK(value == doctest::Approx(2.0 * std::log(std::cosh(1.0))).epsilon(1e-12));
    CHECK(value == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("V1 delay integral against the closed form") {
    // x frozen at c: integral term = q tanh(c)^2 \int_{t-1}^t e^{alpha s} ds.
    const double alpha = 0.5, q = 2.0, c = 0.7, t = 2.0;
    const LyapunovV1Spec spec = scalar_spec(0.0, 0.0, q, NuFunction::exponential(alpha));
    const SwitchedNetworkModel m = scalar_model();
    const DelayFunction delay = DelayFunction::constant(1.0);
    const Trajectory traj = constant_trajectory(c, 1, 0.005, 3.0);
    const InitialSegment init = InitialSegment::constant(Eigen::VectorXd::Constant(1, c));
    const double g2 = std::tanh(c) * std::tanh(c);
    const double expected = q * g2 * (std::exp(alpha * t) - std::exp(alpha * (t - 1.0))) / alpha;
    CHECK(eval_V1(spec, m, delay, traj, init, t) == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("V1 lower bound: V1 >= nu(t) lambda_min(P) |x|^2 along a real trajectory") {
    const SwitchedNetworkModel model = example_model();
    const RateMap rates = example_rates();
    const DelayFunction delay = DelayFunction::constant(1.0);
    const NuFunction nu = NuFunction::exponential(0.01);
    const CertificateThm4 cert = example_certificate_constant();
    const LyapunovV1Spec spec = LyapunovV1Spec::from(cert, nu);
    const InitialSegment init = InitialSegment::constant(Eigen::Vector2d(-0.4, 0.6));

    const SwitchingPath path = sample_path(ReflectedMaxWalk{}, rates, 0, 5.0, 21);
    const Trajectory traj = integrate(model, path, delay, init, 0.01, 5.0, 21);
    const V1Evaluator evaluator(spec, model, delay, traj, init);

    std::vector<double> lambda_min(cert.P.size());
    for (std::size_t k = 0; k < cert.P.size(); ++k)
        lambda_min[k] = -lambda_max_sym(Eigen::MatrixXd(-cert.P[k]));

    for (std::size_t j = 0; j < traj.times.size(); j += 7) {
        const double v = evaluator.at_index(j);
        const double bound = nu.value(traj.times[j]) *
                             lambda_min[static_cast<std::size_t>(traj.modes[j])] *
                             traj.states[j].squaredNorm();
        CHECK(v >= bound - 1e-12);
    }
}

TEST_CASE("generator at the origin vanishes") {
    const SwitchedNetworkModel model = example_model();
    const RateMap rates = example_rates();
    const LyapunovV1Spec spec =
        LyapunovV1Spec::from(example_certificate_constant(), NuFunction::exponential(0.01));
    const GeneratorValue gen =
        eval_generator_V1(spec, model, ReflectedMaxWalk{}, rates, Eigen::VectorXd::Zero(2),
                          Eigen::VectorXd::Zero(2), 0, 1.0, DelayFunction::constant(1.0));
    CHECK(gen.value == 0.0);
}

TEST_CASE("generator of the scalar no-switching linear case is -2 at x = 1") {
    // f = -x (D = 1, A = B = 0), no noise, P = 1, Z = 0, Q = 0, nu = 1,
    // mu = 0: AV = 2 x P f = -2 at x = 1. Linear output keeps f = -D x exact.
    SwitchedNetworkModel m = scalar_model();
    m.nonlinearity = Nonlinearity::linear(1);
    const LyapunovV1Spec spec = scalar_spec(1.0, 0.0, 0.0, NuFunction::exponential(0.0));
    RateMap zero_rate;
    zero_rate.rates = {0.0};
    zero_rate.mu0 = 1.0;
    const SwitchingFamily family = FiniteMarkov{Eigen::MatrixXd::Identity(1, 1)};
    const GeneratorValue gen = eval_generator_V1(
        spec, m, family, zero_rate, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 0, 0.5,
        DelayFunction::constant(1.0));
    CHECK(!gen.is_bound);
    CHECK(gen.value == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("certified system: generator is non-positive and below the Pi quadratic form") {
    const SwitchedNetworkModel model = example_model();
    const RateMap rates = example_rates();
    const DelayFunction delay = DelayFunction::constant(1.0);
    const NuFunction nu = NuFunction::exponential(0.01);
    const CertificateThm4 cert = example_certificate_constant();
    const LyapunovV1Spec spec = LyapunovV1Spec::from(cert, nu);
    const SwitchingFamily family = ReflectedMaxWalk{};
    const InitialSegment init = InitialSegment::constant(Eigen::Vector2d(-0.4, 0.6));

    const SwitchingPath path = sample_path(family, rates, 0, 4.0, 33);
    const Trajectory traj = integrate(model, path, delay, init, 0.01, 4.0, 33);

    std::vector<Eigen::MatrixXd> pi_by_mode;
    for (ModeId mode = 0; mode < 2; ++mode)
        pi_by_mode.push_back(build_pi(model, cert, family, rates, mode));

    for (std::size_t j = 0; j < traj.times.size(); j += 5) {
        const double t = traj.times[j];
        const Eigen::VectorXd& x = traj.states[j];
        const Eigen::VectorXd xdel = traj.state_at(t - delay.tau(t), &init, delay.tau_b());
        const ModeId mode = traj.modes[j];
        const GeneratorValue gen =
            eval_generator_V1(spec, model, family, rates, x, xdel, mode, t, delay);

        Eigen::VectorXd y(6);
        y << x, model.g(x), model.g(xdel);
        const double quad = nu.value(t) * y.dot(pi_by_mode[static_cast<std::size_t>(mode)] * y);
        const double scale = std::max(1.0, std::abs(quad));
        CHECK(gen.value <= quad + 1e-9 * scale);
        CHECK(gen.value <= 1e-9 * scale);
        CHECK(gen.is_bound == (mode == 1));
    }
}

TEST_CASE("mc ensemble basics") {
    const SwitchedNetworkModel model = example_model();
    const RateMap rates = example_rates();
    const DelayFunction delay = DelayFunction::constant(1.0);
    const NuFunction nu = NuFunction::exponential(0.01);

    SUBCASE("zero initial data gives identically zero statistics") {
        McOptions options;
        options.h = 0.05;
        options.horizon = 2.0;
        options.trials = 8;
        options.seed = 4;
        options.epsilons = {0.1};
        const McStats stats = mc_ensemble(model, ReflectedMaxWalk{}, rates, 0, delay,
                                          InitialSegment::constant(Eigen::VectorXd::Zero(2)), nu,
                                          options);
        for (double v : stats.mean_x2) CHECK(v == 0.0);
        for (double v : stats.exceedance[0]) CHECK(v == 0.0);
        CHECK(stats.diverged == 0);
    }
    SUBCASE("aggregates are independent of the thread count") {
        McOptions options;
        options.h = 0.05;
        options.horizon = 2.0;
        options.trials = 12;
        options.seed = 9;
        options.epsilons = {0.3};
        const InitialSegment init = InitialSegment::constant(Eigen::Vector2d(-0.4, 0.6));
        McOptions serial = options;
        serial.threads = 1;
        McOptions parallel = options;
        parallel.threads = 4;
        const McStats a =
            mc_ensemble(model, ReflectedMaxWalk{}, rates, 0, delay, init, nu, serial);
        const McStats b =
            mc_ensemble(model, ReflectedMaxWalk{}, rates, 0, delay, init, nu, parallel);
        REQUIRE(a.mean_x2.size() == b.mean_x2.size());
        for (std::size_t j = 0; j < a.mean_x2.size(); ++j) {
            CHECK(a.mean_x2[j] == b.mean_x2[j]);  // bitwise: ordered reduction
            CHECK(a.se_x2[j] == b.se_x2[j]);
        }
    }
    SUBCASE("trials below two are rejected") {
        McOptions options;
        options.trials = 0;
        CHECK_THROWS_AS(mc_ensemble(model, ReflectedMaxWalk{}, rates, 0, delay,
                                    InitialSegment::constant(Eigen::VectorXd::Zero(2)), nu,
                                    options),
                        ConfigError);
    }
}

TEST_CASE("supermartingale check") {
    SUBCASE("zero ensemble trivially passes") {
        McStats stats;
        stats.has_V = true;
        stats.times = {0.0, 0.1, 0.2};
        stats.mean_V = {0.0, 0.0, 0.0};
        stats.se_V = {0.0, 0.0, 0.0};
        CHECK(supermartingale_check(stats, 0.1).pass);
    }
    SUBCASE("a rising mean V fails") {
        McStats stats;
        stats.has_V = true;
        stats.times = {0.0, 0.1, 0.2, 0.3};
        stats.mean_V = {1.0, 1.0, 1.5, 2.5};
        stats.se_V = {0.0, 0.01, 0.01, 0.02};
        const SupermartingaleReport report = supermartingale_check(stats, 0.1);
        CHECK(!report.pass);
        CHECK(report.worst_violation > 0.0);
        CHECK(report.worst_to > report.worst_from);
    }
    SUBCASE("the uncertified mode-0 subsystem violates the supermartingale property") {
        const SwitchedNetworkModel model = example_model();
        RateMap rates;
        rates.rates = {1.0, 1.0};
        rates.mu0 = 1.0;
        McOptions options;
        options.h = 0.02;
        options.horizon = 30.0;
        options.trials = 40;
        options.seed = 12;
        const LyapunovV1Spec v1 =
            LyapunovV1Spec::from(example_certificate_constant(), NuFunction::exponential(0.01));
        const McStats stats = mc_ensemble(
            model, FixedSequence{{0}}, rates, 0, DelayFunction::constant(1.0),
            InitialSegment::constant(Eigen::Vector2d(-0.4, 0.6)), NuFunction::exponential(0.01),
            options, &v1);
        CHECK(!supermartingale_check(stats, options.h).pass);
    }
}

TEST_CASE("Dynkin residual") {
    SUBCASE("zero initial data gives a residual of exactly zero") {
        SwitchedNetworkModel m = scalar_model();
        const LyapunovV1Spec spec = scalar_spec(1.0, 0.0, 0.0, NuFunction::exponential(0.0));
        RateMap rates;
        rates.rates = {1.0};
        rates.mu0 = 1.0;
        const DynkinReport report = dynkin_residual(
            spec, m, FiniteMarkov{Eigen::MatrixXd::Identity(1, 1)}, rates, 0,
            DelayFunction::constant(1.0), InitialSegment::constant(Eigen::VectorXd::Zero(1)),
            0.05, 1.0, 16, 3);
        CHECK(report.residual == 0.0);
        CHECK(report.pass);
    }
    SUBCASE("pure-jump case: V jumps balance the chi integral") {
        // Near-zero drift freezes x at phi(0); V = x' P(r) x moves only
        // through switches, so the identity is exact up to Monte Carlo error.
        SwitchedNetworkModel m;
        m.n = 1;
        m.D = {1e-12 * Eigen::MatrixXd::Identity(1, 1), 1e-12 * Eigen::MatrixXd::Identity(1, 1)};
        m.A = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)};
        m.B = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)};
        m.nonlinearity = Nonlinearity::tanh(1);
        m.noise = NoiseSpec::zero();
        m.a = {1.0, 1.0};
        m.E = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)};
        m.F = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)};

        LyapunovV1Spec spec{{Eigen::MatrixXd::Constant(1, 1, 2.0),
                             Eigen::MatrixXd::Constant(1, 1, 0.5)},
                            Eigen::VectorXd::Zero(1),
                            Eigen::MatrixXd::Zero(1, 1),
                            NuFunction::exponential(0.0)};
        Eigen::MatrixXd R(2, 2);
        R << 0.3, 0.7, 0.6, 0.4;
        RateMap rates;
        rates.rates = {2.0, 3.0};
        rates.mu0 = 3.0;
        const DynkinReport report = dynkin_residual(
            spec, m, FiniteMarkov{R}, rates, 0, DelayFunction::constant(1.0),
            InitialSegment::constant(Eigen::VectorXd::Ones(1)), 0.02, 2.0, 2000, 77);
        CHECK(std::abs(report.residual) <= 3.0 * report.se);
    }
    SUBCASE("bound-only switching families are rejected") {
        const SwitchedNetworkModel model = example_model();
        const LyapunovV1Spec spec =
            LyapunovV1Spec::from(example_certificate_constant(), NuFunction::exponential(0.01));
        CHECK_THROWS_AS(
            dynkin_residual(spec, model, ReflectedMaxWalk{}, example_rates(), 0,
                            DelayFunction::constant(1.0),
                            InitialSegment::constant(Eigen::Vector2d(-0.4, 0.6)), 0.02, 5.0, 4,
                            5),
            ConfigError);
    }
}

TEST_CASE("Halanay comparison dynamics") {
    SUBCASE("beta = 0 reduces to exponential decay") {
        HalanayProblem p;
        p.alpha = TimeFunction::constant(2.0);
        p.beta = TimeFunction::constant(0.0);
        p.eta = 2.0;
        p.J0 = 0.0;
        p.delay = DelayFunction::constant(1.0);
        p.u0 = 1.0;
        const HalanaySeries series = halanay_integrate(p, 1e-3, 10.0);
        double worst = 0.0;
        for (std::size_t j = 0; j < series.times.size(); ++j)
            worst = std::max(worst,
                             std::abs(series.values[j] - std::exp(-2.0 * series.times[j])));
        CHECK(worst < 2e-3);
    }
    SUBCASE("alpha=2, beta=1, J0=0: decay below 0.1 by t=10, never above u0") {
        HalanayProblem p;
        p.alpha = TimeFunction::constant(2.0);
        p.beta = TimeFunction::constant(1.0);
        p.eta = 1.0;
        p.J0 = 0.0;
        p.delay = DelayFunction::constant(1.0);
        p.u0 = 1.0;
        const HalanaySeries series = halanay_integrate(p, 1e-3, 10.0);
        for (double v : series.values) CHECK(v <= 1.0 + 1e-12);
        CHECK(series.values.back() < 0.1);

        // Decay rate against the characteristic root r = alpha - beta e^{r tau}.
        double lo = 0.0, hi = 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (2.0 - std::exp(mid) - mid > 0.0 ? lo : hi) = mid;
        }
        const double root = 0.5 * (lo + hi);
        const std::size_t i1 = 6000, i2 = 9000;
        const double slope = (std::log(series.values[i1]) - std::log(series.values[i2])) /
                             (series.times[i2] - series.times[i1]);
        CHECK(slope >= root - 0.02);
        CHECK(slope <= root + 0.02);
    }
    SUBCASE("persistent forcing: sup u <= max(J0/eta, u0) + Euler slack") {
        HalanayProblem p;
        p.alpha = TimeFunction::constant(2.0);
        p.beta = TimeFunction::constant(1.0);
        p.eta = 1.0;
        p.J0 = 3.0;
        p.delay = DelayFunction::constant(1.0);
        p.u0 = 0.5;
        const double h = 1e-3;
        const HalanayReport report = halanay_bound_check(p, h, 30.0);
        CHECK(report.precondition_ok);
        CHECK(report.pass);
        CHECK(report.bound == 3.0);

        // u climbs into [2.9, 3.0] and stays.
        const HalanaySeries series = halanay_integrate(p, h, 30.0);
        std::size_t entered = series.times.size();
        for (std::size_t j = 0; j < series.values.size(); ++j) {
            if (series.values[j] >= 2.9) {
                entered = j;
                break;
            }
        }
        REQUIRE(entered < series.times.size());
        for (std::size_t j = entered; j < series.values.size(); ++j) {
            CHECK(series.values[j] >= 2.9);
            CHECK(series.values[j] <= 3.0 + report.slack);
        }
    }
    SUBCASE("violated precondition reports failure without applying the theorem") {
        HalanayProblem p;
        p.alpha = TimeFunction::constant(1.0);
        p.beta = TimeFunction::constant(1.0);
        p.eta = 0.5;
        p.J0 = 0.0;
        p.delay = DelayFunction::constant(1.0);
        p.u0 = 1.0;
        const HalanayReport report = halanay_bound_check(p, 1e-2, 5.0);
        CHECK(!report.precondition_ok);
        CHECK(!report.pass);
    }
}

TEST_CASE("classification") {
    SUBCASE("zero ensemble: every verdict passes with M = 0") {
        const SwitchedNetworkModel model = example_model();
        McOptions options;
        options.h = 0.05;
        options.horizon = 300.0;
        options.trials = 4;
        options.seed = 2;
        options.epsilons = {0.1};
        const McStats stats = mc_ensemble(model, ReflectedMaxWalk{}, example_rates(), 0,
                                          DelayFunction::constant(1.0),
                                          InitialSegment::constant(Eigen::VectorXd::Zero(2)),
                                          NuFunction::exponential(0.01), options);
        const Classification c = classify_stability(stats, NuFunction::exponential(0.01));
        CHECK(c.mean_square);
        CHECK(c.nu_mean_square);
        CHECK(c.M_estimate == 0.0);
        REQUIRE(c.in_probability.size() == 1);
        CHECK(c.in_probability[0]);
    }
    SUBCASE("short horizons draw the low-power diagnostic") {
        McStats stats;
        stats.times = {0.0, 0.5, 1.0};
        stats.mean_x2 = {0.0, 0.0, 0.0};
        stats.nu_mean_x2 = {0.0, 0.0, 0.0};
        stats.trials = 4;
        const Classification c = classify_stability(stats, NuFunction::exponential(0.01));
        REQUIRE(!c.diagnostics.empty());
    }
}

TEST_CASE("mc stats CSV layout") {
    McStats stats;
    stats.times = {0.0};
    stats.mean_x2 = {1.0};
    stats.se_x2 = {0.1};
    stats.nu_mean_x2 = {1.0};
    stats.epsilons = {0.5};
    stats.exceedance = {{0.25}};
    stats.trials = 4;
    std::ostringstream os;
    stats.write_csv(os);
    CHECK(os.str() == "t,mean_x2,se_x2,nu_mean_x2,exceed_eps1\n0,1,0.10000000000000001,1,0.25\n");
}
