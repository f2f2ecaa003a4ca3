#include "switchsde/io.hpp"

#include <cstdio>
#include <fstream>

namespace switchsde {

using nlohmann::json;

std::string fmt17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

}  // namespace

json to_json(const SemidefReport& report) {
    return {{"label", report.label},
            {"lambda_max", report.lambda_max},
            {"tolerance", report.tolerance},
            {"pass", report.pass},
            {"witness", vector_json(report.witness)}};
}

json to_json(const CheckResult& result) {
    json reports = json::array();
    for (const auto& r : result.reports) reports.push_back(to_json(r));
    return {{"pass", result.pass},
            {"conservative", result.conservative},
            {"worst_lambda_max", result.worst_lambda_max},
            {"worst_label", result.worst_label},
            {"reports", reports}};
}

json to_json(const DelayReport& report) {
    return {{"tau_star_claimed", report.tau_star_claimed},
            {"tau_star_estimate", report.tau_star_estimate},
            {"tau_b_claimed", report.tau_b_claimed},
            {"tau_b_estimate", report.tau_b_estimate},
            {"max_claim_error", report.max_claim_error},
            {"positivity_ok", report.positivity_ok},
            {"derivative_reaches_one", report.derivative_reaches_one},
            {"derivative_witness_t", report.derivative_witness_t},
            {"pass", report.pass},
            {"message", report.message}};
}

json to_json(const NuConstants& constants) {
    json j = {{"alpha_nu", constants.alpha_nu},
              {"beta_nu_thm4", constants.beta_nu_thm4},
              {"beta_nu_thm5", constants.beta_nu_thm5},
              {"has_closed_form", constants.has_closed_form}};
    if (constants.has_closed_form) {
        j["cf_alpha_nu"] = constants.cf_alpha_nu;
        j["cf_beta_nu_thm4"] = constants.cf_beta_nu_thm4;
        j["cf_beta_nu_thm5"] = constants.cf_beta_nu_thm5;
        j["attained"] = constants.attained;
    }
    return j;
}

json to_json(const HypothesisReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"which", v.which},
                              {"mode", v.mode},
                              {"u", vector_json(v.u)},
                              {"v", vector_json(v.v)},
                              {"lhs", v.lhs},
                              {"rhs", v.rhs}});
    return {{"g_zero_ok", report.g_zero_ok},
            {"g_slope_ok", report.g_slope_ok},
            {"h32_ok", report.h32_ok},
            {"h33_ok", report.h33_ok},
            {"h33_checked", report.h33_checked},
            {"min_slack_h32", report.min_slack_h32},
            {"min_slack_h33", report.min_slack_h33},
            {"pass", report.pass},
            {"message", report.message},
            {"violations", violations}};
}

json to_json(const HalanayReport& report) {
    return {{"bound", report.bound},
            {"max_violation", report.max_violation},
            {"slack", report.slack},
            {"precondition_ok", report.precondition_ok},
            {"precondition_worst_t", report.precondition_worst_t},
            {"pass", report.pass},
            {"message", report.message}};
}

json to_json(const SupermartingaleReport& report) {
    return {{"worst_violation", report.worst_violation},
            {"worst_from", report.worst_from},
            {"worst_to", report.worst_to},
            {"slack", report.slack},
            {"pass", report.pass}};
}

json to_json(const Classification& classification) {
    return {{"mean_square", classification.mean_square},
            {"nu_mean_square", classification.nu_mean_square},
            {"in_probability", classification.in_probability},
            {"M_estimate", classification.M_estimate},
            {"M_argmax_t", classification.M_argmax_t},
            {"diagnostics", classification.diagnostics}};
}

namespace {

void flatten(const json& j, const std::string& prefix, std::string& out) {
    for (const auto& item : j.items()) {
        const std::string key = prefix.empty() ? item.key() : prefix + "." + item.key();
        if (item.value().is_object()) {
            flatten(item.value(), key, out);
        } else {
            out += key;
            out += ": ";
            out += item.value().dump();
            out += '\n';
        }
    }
}

}  // namespace

std::string to_key_value_text(const json& j) {
    std::string out;
    flatten(j, "", out);
    return out;
}

std::string matrix_to_text(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out += ' ';
            out += fmt17(m(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

}  // namespace switchsde
