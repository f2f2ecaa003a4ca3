#include "switchsde/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace switchsde {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (allowed_set.find(item.key()) == allowed_set.end())
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

const json& require(const json& j, const std::string& where, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + ": missing key '" + key + "'");
    return *it;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

Eigen::VectorXd parse_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where);
    return v;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nested array");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ConfigError(where + ": expected row-major nested arrays");
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError(where + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], where);
    }
    return m;
}

std::vector<Eigen::MatrixXd> parse_matrix_family(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected one matrix per mode");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k)
        out.push_back(parse_matrix(j[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json j = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

json matrix_family_to_json(const std::vector<Eigen::MatrixXd>& family) {
    json j = json::array();
    for (const auto& m : family) j.push_back(matrix_to_json(m));
    return j;
}

SwitchedNetworkModel parse_model(const json& j) {
    check_keys(j, "model", {"n", "D", "A", "B", "nonlinearity", "noise", "noise_bounds"});
    SwitchedNetworkModel model;
    model.n = static_cast<int>(number(require(j, "model", "n"), "model.n"));
    model.D = parse_matrix_family(require(j, "model", "D"), "model.D");
    model.A = parse_matrix_family(require(j, "model", "A"), "model.A");
    model.B = parse_matrix_family(require(j, "model", "B"), "model.B");

    const json& nl = require(j, "model", "nonlinearity");
    check_keys(nl, "model.nonlinearity", {"kind", "G"});
    const std::string nl_kind = require(nl, "model.nonlinearity", "kind").get<std::string>();
    if (nl_kind == "tanh")
        model.nonlinearity = Nonlinearity::tanh(model.n);
    else if (nl_kind == "linear")
        model.nonlinearity = Nonlinearity::linear(model.n);
    else
        throw ConfigError("model.nonlinearity.kind: unknown kind '" + nl_kind + "'");
    if (nl.contains("G")) model.nonlinearity.G = parse_vector(nl["G"], "model.nonlinearity.G");

    const json& noise = require(j, "model", "noise");
    check_keys(noise, "model.noise", {"kind", "C1", "C2"});
    const std::string noise_kind = require(noise, "model.noise", "kind").get<std::string>();
    if (noise_kind == "zero") {
        model.noise = NoiseSpec::zero();
    } else if (noise_kind == "delayed_output") {
        model.noise = NoiseSpec::delayed_output();
    } else if (noise_kind == "linear_mix") {
        model.noise = NoiseSpec::linear_mix(
            parse_matrix_family(require(noise, "model.noise", "C1"), "model.noise.C1"),
            parse_matrix_family(require(noise, "model.noise", "C2"), "model.noise.C2"));
    } else {
        throw ConfigError("model.noise.kind: unknown kind '" + noise_kind + "'");
    }

    const json& bounds = require(j, "model", "noise_bounds");
    check_keys(bounds, "model.noise_bounds", {"a", "E", "F"});
    const Eigen::VectorXd a = parse_vector(require(bounds, "model.noise_bounds", "a"),
                                           "model.noise_bounds.a");
    model.a.assign(a.data(), a.data() + a.size());
    model.E = parse_matrix_family(require(bounds, "model.noise_bounds", "E"), "model.noise_bounds.E");
    model.F = parse_matrix_family(require(bounds, "model.noise_bounds", "F"), "model.noise_bounds.F");
    return model;
}

json model_to_json(const SwitchedNetworkModel& model, const std::string& nl_kind,
                   const std::string& noise_kind) {
    json j;
    j["n"] = model.n;
    j["D"] = matrix_family_to_json(model.D);
    j["A"] = matrix_family_to_json(model.A);
    j["B"] = matrix_family_to_json(model.B);
    j["nonlinearity"] = {{"kind", nl_kind}, {"G", vector_to_json(model.nonlinearity.G)}};
    json noise;
    noise["kind"] = noise_kind;
    if (model.noise.kind == NoiseSpec::Kind::LinearMix) {
        noise["C1"] = matrix_family_to_json(model.noise.C1);
        noise["C2"] = matrix_family_to_json(model.noise.C2);
    }
    j["noise"] = noise;
    Eigen::VectorXd a(static_cast<Eigen::Index>(model.a.size()));
    for (std::size_t i = 0; i < model.a.size(); ++i) a(static_cast<Eigen::Index>(i)) = model.a[i];
    j["noise_bounds"] = {{"a", vector_to_json(a)},
                         {"E", matrix_family_to_json(model.E)},
                         {"F", matrix_family_to_json(model.F)}};
    return j;
}

SwitchingFamily parse_family(const json& j) {
    check_keys(j, "switching.family",
               {"kind", "dist", "R", "T", "emission", "initial_hidden", "modes"});
    const std::string kind = require(j, "switching.family", "kind").get<std::string>();
    if (kind == "iid") {
        IndependentIid f;
        const Eigen::VectorXd d = parse_vector(require(j, "switching.family", "dist"),
                                               "switching.family.dist");
        f.dist.assign(d.data(), d.data() + d.size());
        return f;
    }
    if (kind == "finite_markov")
        return FiniteMarkov{parse_matrix(require(j, "switching.family", "R"), "switching.family.R")};
    if (kind == "hidden_markov") {
        HiddenMarkov f;
        f.hidden_transition = parse_matrix(require(j, "switching.family", "T"), "switching.family.T");
        f.emission =
            parse_matrix(require(j, "switching.family", "emission"), "switching.family.emission");
        f.initial_hidden = static_cast<int>(
            number(require(j, "switching.family", "initial_hidden"), "switching.family.initial_hidden"));
        return f;
    }
    if (kind == "reflected_max_walk") return ReflectedMaxWalk{};
    if (kind == "fixed_sequence") {
        FixedSequence f;
        for (const auto& m : require(j, "switching.family", "modes"))
            f.modes.push_back(static_cast<ModeId>(number(m, "switching.family.modes")));
        return f;
    }
    throw ConfigError("switching.family.kind: unknown kind '" + kind + "'");
}

json family_to_json(const SwitchingFamily& family) {
    json j;
    if (const auto* iid = std::get_if<IndependentIid>(&family)) {
        j["kind"] = "iid";
        j["dist"] = iid->dist;
    } else if (const auto* fm = std::get_if<FiniteMarkov>(&family)) {
        j["kind"] = "finite_markov";
        j["R"] = matrix_to_json(fm->transition);
    } else if (const auto* hm = std::get_if<HiddenMarkov>(&family)) {
        j["kind"] = "hidden_markov";
        j["T"] = matrix_to_json(hm->hidden_transition);
        j["emission"] = matrix_to_json(hm->emission);
        j["initial_hidden"] = hm->initial_hidden;
    } else if (std::holds_alternative<ReflectedMaxWalk>(family)) {
        j["kind"] = "reflected_max_walk";
    } else {
        j["kind"] = "fixed_sequence";
        j["modes"] = std::get<FixedSequence>(family).modes;
    }
    return j;
}

DelayFunction parse_delay(const json& j) {
    check_keys(j, "delay", {"kind", "value", "slope", "intercept"});
    const std::string kind = require(j, "delay", "kind").get<std::string>();
    if (kind == "constant")
        return DelayFunction::constant(number(require(j, "delay", "value"), "delay.value"));
    if (kind == "affine")
        return DelayFunction::affine(number(require(j, "delay", "slope"), "delay.slope"),
                                     number(require(j, "delay", "intercept"), "delay.intercept"));
    throw ConfigError("delay.kind: unknown kind '" + kind + "' (custom delays are code-only)");
}

json delay_to_json(const DelayFunction& d) {
    json j;
    if (d.kind() == DelayFunction::Kind::Constant) {
        j["kind"] = "constant";
        j["value"] = d.constant_value();
    } else if (d.kind() == DelayFunction::Kind::Affine) {
        j["kind"] = "affine";
        j["slope"] = d.affine_slope();
        j["intercept"] = d.affine_intercept();
    } else {
        throw ConfigError("custom delays cannot be serialized to configuration");
    }
    return j;
}

NuFunction parse_nu(const json& j, const DelayFunction& delay) {
    check_keys(j, "nu", {"kind", "alpha"});
    const std::string kind = require(j, "nu", "kind").get<std::string>();
    const double tau_b = delay.tau_b();
    if (kind == "exponential")
        return NuFunction::exponential(number(require(j, "nu", "alpha"), "nu.alpha"));
    if (!std::isfinite(tau_b))
        throw ConfigError("nu: the " + kind + " variant needs a finite tau_b from the delay");
    if (kind == "power") return NuFunction::power(number(require(j, "nu", "alpha"), "nu.alpha"), tau_b);
    if (kind == "log") return NuFunction::log(tau_b);
    if (kind == "loglog") return NuFunction::loglog(tau_b);
    throw ConfigError("nu.kind: unknown kind '" + kind + "'");
}

json nu_to_json(const NuFunction& nu) {
    json j;
    switch (nu.kind()) {
        case NuFunction::Kind::Exponential:
            j["kind"] = "exponential";
            j["alpha"] = nu.alpha();
            break;
        case NuFunction::Kind::Power:
            j["kind"] = "power";
            j["alpha"] = nu.alpha();
            break;
        case NuFunction::Kind::Log:
            j["kind"] = "log";
            break;
        case NuFunction::Kind::LogLog:
            j["kind"] = "loglog";
            break;
        case NuFunction::Kind::Custom:
            throw ConfigError("custom nu cannot be serialized to configuration");
    }
    return j;
}

TimeFunction parse_time_function(const json& j, const std::string& where) {
    if (j.is_number()) return TimeFunction::constant(j.get<double>());
    check_keys(j, where, {"times", "values"});
    const Eigen::VectorXd times = parse_vector(require(j, where, "times"), where + ".times");
    const Eigen::VectorXd values = parse_vector(require(j, where, "values"), where + ".values");
    return TimeFunction::piecewise(std::vector<double>(times.data(), times.data() + times.size()),
                                   std::vector<double>(values.data(), values.data() + values.size()));
}

json time_function_to_json(const TimeFunction& f) {
    if (f.is_constant()) return f.constant_value();
    return json{{"times", f.breakpoints()}, {"values", f.values()}};
}

}  // namespace

InitialSegment SimulationConfig::initial_segment() const {
    if (!initial_times.empty()) return InitialSegment::sampled(initial_times, initial_values);
    return InitialSegment::constant(initial);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    check_keys(j, "config",
               {"model", "switching", "delay", "nu", "certificate_thm4", "certificate_thm5",
                "halanay", "simulation", "classification", "output"});

    ExperimentConfig cfg;
    cfg.model = parse_model(require(j, "config", "model"));

    const json& sw = require(j, "config", "switching");
    check_keys(sw, "switching", {"family", "rates", "mu0", "initial_mode"});
    cfg.family = parse_family(require(sw, "switching", "family"));
    const Eigen::VectorXd rates = parse_vector(require(sw, "switching", "rates"), "switching.rates");
    cfg.rates.rates.assign(rates.data(), rates.data() + rates.size());
    cfg.rates.mu0 = number(require(sw, "switching", "mu0"), "switching.mu0");
    cfg.initial_mode =
        static_cast<ModeId>(number(require(sw, "switching", "initial_mode"), "switching.initial_mode"));

    cfg.delay = parse_delay(require(j, "config", "delay"));
    cfg.nu = parse_nu(require(j, "config", "nu"), cfg.delay);

    if (j.contains("certificate_thm4")) {
        const json& c = j["certificate_thm4"];
        check_keys(c, "certificate_thm4", {"P", "Z", "Q", "R", "alpha_nu", "beta_nu"});
        CertificateThm4 cert;
        cert.P = parse_matrix_family(require(c, "certificate_thm4", "P"), "certificate_thm4.P");
        cert.Z = parse_vector(require(c, "certificate_thm4", "Z"), "certificate_thm4.Z");
        cert.Q = parse_matrix(require(c, "certificate_thm4", "Q"), "certificate_thm4.Q");
        cert.R = parse_matrix_family(require(c, "certificate_thm4", "R"), "certificate_thm4.R");
        cert.alpha_nu = c.contains("alpha_nu") ? number(c["alpha_nu"], "certificate_thm4.alpha_nu")
                                               : std::numeric_limits<double>::quiet_NaN();
        cert.beta_nu = c.contains("beta_nu") ? number(c["beta_nu"], "certificate_thm4.beta_nu")
                                             : std::numeric_limits<double>::quiet_NaN();
        cfg.thm4 = std::move(cert);
    }

    if (j.contains("certificate_thm5")) {
        const json& c = j["certificate_thm5"];
        check_keys(c, "certificate_thm5",
                   {"P", "V", "W", "rho1", "kappa", "kappa_prime", "alpha_nu", "beta_nu"});
        CertificateThm5 cert;
        cert.P = parse_matrix_family(require(c, "certificate_thm5", "P"), "certificate_thm5.P");
        for (const auto& v : require(c, "certificate_thm5", "V"))
            cert.V.push_back(parse_vector(v, "certificate_thm5.V"));
        for (const auto& w : require(c, "certificate_thm5", "W"))
            cert.W.push_back(parse_vector(w, "certificate_thm5.W"));
        cert.rho1 = number(require(c, "certificate_thm5", "rho1"), "certificate_thm5.rho1");
        cert.kappa = number(require(c, "certificate_thm5", "kappa"), "certificate_thm5.kappa");
        cert.kappa_prime =
            number(require(c, "certificate_thm5", "kappa_prime"), "certificate_thm5.kappa_prime");
        cert.alpha_nu = c.contains("alpha_nu") ? number(c["alpha_nu"], "certificate_thm5.alpha_nu")
                                               : std::numeric_limits<double>::quiet_NaN();
        cert.beta_nu = c.contains("beta_nu") ? number(c["beta_nu"], "certificate_thm5.beta_nu")
                                             : std::numeric_limits<double>::quiet_NaN();
        cfg.thm5 = std::move(cert);
    }

    if (j.contains("halanay")) {
        const json& hj = j["halanay"];
        check_keys(hj, "halanay", {"alpha", "beta", "eta", "J0", "u0"});
        HalanayProblem problem;
        problem.alpha = parse_time_function(require(hj, "halanay", "alpha"), "halanay.alpha");
        problem.beta = parse_time_function(require(hj, "halanay", "beta"), "halanay.beta");
        problem.eta = number(require(hj, "halanay", "eta"), "halanay.eta");
        problem.J0 = number(require(hj, "halanay", "J0"), "halanay.J0");
        problem.u0 = number(require(hj, "halanay", "u0"), "halanay.u0");
        problem.delay = cfg.delay;
        cfg.halanay = std::move(problem);
    }

    const json& sim = require(j, "config", "simulation");
    check_keys(sim, "simulation", {"h", "horizon", "trials", "seed", "initial", "epsilons"});
    cfg.simulation.h = number(require(sim, "simulation", "h"), "simulation.h");
    cfg.simulation.horizon = number(require(sim, "simulation", "horizon"), "simulation.horizon");
    cfg.simulation.trials =
        static_cast<int>(number(require(sim, "simulation", "trials"), "simulation.trials"));
    cfg.simulation.seed = static_cast<std::uint64_t>(
        number(require(sim, "simulation", "seed"), "simulation.seed"));
    const json& initial = require(sim, "simulation", "initial");
    if (initial.is_array()) {
        cfg.simulation.initial = parse_vector(initial, "simulation.initial");
    } else {
        check_keys(initial, "simulation.initial", {"times", "values"});
        const Eigen::VectorXd times =
            parse_vector(require(initial, "simulation.initial", "times"), "simulation.initial.times");
        cfg.simulation.initial_times.assign(times.data(), times.data() + times.size());
        for (const auto& v : require(initial, "simulation.initial", "values"))
            cfg.simulation.initial_values.push_back(parse_vector(v, "simulation.initial.values"));
    }
    if (sim.contains("epsilons")) {
        const Eigen::VectorXd eps = parse_vector(sim["epsilons"], "simulation.epsilons");
        cfg.simulation.epsilons.assign(eps.data(), eps.data() + eps.size());
    }

    if (j.contains("classification")) {
        const json& cj = j["classification"];
        check_keys(cj, "classification", {"mean_square_threshold", "exceedance_level"});
        if (cj.contains("mean_square_threshold"))
            cfg.classification.mean_square_threshold =
                number(cj["mean_square_threshold"], "classification.mean_square_threshold");
        if (cj.contains("exceedance_level"))
            cfg.classification.exceedance_level =
                number(cj["exceedance_level"], "classification.exceedance_level");
    }

    if (j.contains("output")) {
        const json& oj = j["output"];
        check_keys(oj, "output", {"directory", "formats"});
        if (oj.contains("directory")) cfg.output.directory = oj["directory"].get<std::string>();
        if (oj.contains("formats"))
            cfg.output.formats = oj["formats"].get<std::vector<std::string>>();
    }

    cfg.cross_validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

json ExperimentConfig::to_json() const {
    json j;
    std::string nl_kind = "tanh";
    if (model.nonlinearity.kind == Nonlinearity::Kind::Linear) nl_kind = "linear";
    if (model.nonlinearity.kind == Nonlinearity::Kind::Custom)
        throw ConfigError("custom nonlinearities cannot be serialized to configuration");
    std::string noise_kind = "zero";
    if (model.noise.kind == NoiseSpec::Kind::DelayedOutput) noise_kind = "delayed_output";
    if (model.noise.kind == NoiseSpec::Kind::LinearMix) noise_kind = "linear_mix";
    j["model"] = model_to_json(model, nl_kind, noise_kind);

    j["switching"] = {{"family", family_to_json(family)},
                      {"rates", rates.rates},
                      {"mu0", rates.mu0},
                      {"initial_mode", initial_mode}};
    j["delay"] = delay_to_json(delay);
    j["nu"] = nu_to_json(nu);

    if (thm4) {
        j["certificate_thm4"] = {{"P", matrix_family_to_json(thm4->P)},
                                 {"Z", vector_to_json(thm4->Z)},
                                 {"Q", matrix_to_json(thm4->Q)},
                                 {"R", matrix_family_to_json(thm4->R)},
                                 {"alpha_nu", thm4->alpha_nu},
                                 {"beta_nu", thm4->beta_nu}};
    }
    if (thm5) {
        json vj = json::array(), wj = json::array();
        for (const auto& v : thm5->V) vj.push_back(vector_to_json(v));
        for (const auto& w : thm5->W) wj.push_back(vector_to_json(w));
        j["certificate_thm5"] = {{"P", matrix_family_to_json(thm5->P)},
                                 {"V", vj},
                                 {"W", wj},
                                 {"rho1", thm5->rho1},
                                 {"kappa", thm5->kappa},
                                 {"kappa_prime", thm5->kappa_prime},
                                 {"alpha_nu", thm5->alpha_nu},
                                 {"beta_nu", thm5->beta_nu}};
    }
    if (halanay) {
        j["halanay"] = {{"alpha", time_function_to_json(halanay->alpha)},
                        {"beta", time_function_to_json(halanay->beta)},
                        {"eta", halanay->eta},
                        {"J0", halanay->J0},
                        {"u0", halanay->u0}};
    }

    json sim;
    sim["h"] = simulation.h;
    sim["horizon"] = simulation.horizon;
    sim["trials"] = simulation.trials;
    sim["seed"] = simulation.seed;
    if (simulation.initial_times.empty()) {
        sim["initial"] = vector_to_json(simulation.initial);
    } else {
        json values = json::array();
        for (const auto& v : simulation.initial_values) values.push_back(vector_to_json(v));
        sim["initial"] = {{"times", simulation.initial_times}, {"values", values}};
    }
    if (!simulation.epsilons.empty()) sim["epsilons"] = simulation.epsilons;
    j["simulation"] = sim;

    j["classification"] = {{"mean_square_threshold", classification.mean_square_threshold},
                           {"exceedance_level", classification.exceedance_level}};
    j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
    return j;
}

void ExperimentConfig::cross_validate() {
    model.validate_shapes();
    validate_family(family);

    const int family_modes = family_mode_count(family);
    if (family_modes != model.mode_count())
        throw ConfigError("switching family has " + std::to_string(family_modes) +
                          " modes but the model has " + std::to_string(model.mode_count()));
    if (static_cast<int>(rates.rates.size()) != family_modes)
        throw ConfigError("switching.rates must list one rate per mode");
    for (std::size_t i = 0; i < rates.rates.size(); ++i) {
        if (!(rates.rates[i] > 0.0))
            throw ConfigError("switching.rates: rate for mode " + std::to_string(i) +
                              " must be positive");
        if (rates.rates[i] > rates.mu0 * (1.0 + 1e-12))
            throw ConfigError("switching.rates: rate for mode " + std::to_string(i) +
                              " exceeds mu0");
    }
    if (initial_mode < 0 || initial_mode >= family_modes)
        throw ConfigError("switching.initial_mode out of range");
    (void)initial_state(family, initial_mode);  // walk / sequence-specific rules
    if (const auto* hm = std::get_if<HiddenMarkov>(&family)) {
        if (hm->emission(hm->initial_hidden, initial_mode) == 0.0)
            throw ConfigError(
                "switching: the initial (hidden, mode) pair has zero emission probability");
    }

    if (!(simulation.h > 0.0)) throw ConfigError("simulation.h must be positive");
    if (!(simulation.horizon > 0.0)) throw ConfigError("simulation.horizon must be positive");
    const InitialSegment segment = simulation.initial_segment();
    if (segment.dim() != model.n)
        throw ConfigError("simulation.initial dimension does not match model.n");
    for (double eps : simulation.epsilons)
        if (!(eps > 0.0)) throw ConfigError("simulation.epsilons must be positive");

    // Fill missing certificate constants from the (nu, delay) pair.
    const auto fill = [&](double& alpha, double& beta, bool thm4_variant) {
        if (!std::isnan(alpha) && !std::isnan(beta)) return;
        const NuConstants constants =
            nu_constants(nu, delay, default_grid(std::max(simulation.horizon, 1.0)));
        const bool closed = constants.has_closed_form && constants.attained;
        if (std::isnan(alpha)) alpha = closed ? constants.cf_alpha_nu : constants.alpha_nu;
        if (std::isnan(beta)) {
            if (thm4_variant)
                beta = closed ? constants.cf_beta_nu_thm4 : constants.beta_nu_thm4;
            else
                beta = closed ? constants.cf_beta_nu_thm5 : constants.beta_nu_thm5;
        }
    };
    if (thm4) {
        fill(thm4->alpha_nu, thm4->beta_nu, true);
        thm4->validate(model);
    }
    if (thm5) {
        fill(thm5->alpha_nu, thm5->beta_nu, false);
        thm5->validate(model);
    }
    if (halanay) {
        if (!(halanay->eta > 0.0)) throw ConfigError("halanay.eta must be positive");
        if (halanay->J0 < 0.0) throw ConfigError("halanay.J0 must be non-negative");
        if (halanay->u0 < 0.0) throw ConfigError("halanay.u0 must be non-negative");
    }
}

}  // namespace switchsde
