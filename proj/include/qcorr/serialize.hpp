#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qcorr/measure_value.hpp"
#include "qcorr/relations.hpp"
#include "qcorr/thresholds.hpp"

namespace qcorr {

/// Shortest text with 17 significant digits ("%.17g"), the CSV number format.
std::string format_number(double v);

/// "1" satisfied, "0" violated, "?" indeterminate, "-" degenerate.
std::string verdict_flag(Verdict v);

nlohmann::json to_json(const MeasureValue& v);
nlohmann::json to_json(const OptimizerConfig& c);
nlohmann::json to_json(const BoundEntry& e);
nlohmann::json to_json(const OrderingResult& o);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const ThresholdOutcome& o);

/// Reads an optimizer config object; absent keys keep their defaults and
/// unknown keys raise ConfigError.
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

/// Plain CSV writer: one header line plus rows, comma separated, "\n"
/// terminated. Cells are written verbatim.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

}  // namespace qcorr
