#pragma once

#include <string>

#include <json.hpp>

#include "switchsde/certificates.hpp"
#include "switchsde/delay.hpp"
#include "switchsde/ensemble.hpp"
#include "switchsde/halanay.hpp"
#include "switchsde/model.hpp"
#include "switchsde/nu.hpp"

namespace switchsde {

/// 17 significant digits: round-trip exact for 64-bit floats.
std::string fmt17(double value);

nlohmann::json to_json(const SemidefReport& report);
nlohmann::json to_json(const CheckResult& result);
nlohmann::json to_json(const DelayReport& report);
nlohmann::json to_json(const NuConstants& constants);
nlohmann::json to_json(const HypothesisReport& report);
nlohmann::json to_json(const HalanayReport& report);
nlohmann::json to_json(const SupermartingaleReport& report);
nlohmann::json to_json(const Classification& classification);

/// key: value lines, one per entry of a flat JSON object (nested objects
/// are inlined with dotted keys).
std::string to_key_value_text(const nlohmann::json& j);

/// Plain-text matrix dump, one row per line, for external cross-checking.
std::string matrix_to_text(const Eigen::MatrixXd& m);

void write_file(const std::string& path, const std::string& content);

}  // namespace switchsde
