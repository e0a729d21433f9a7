#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "onlinefwer/config.hpp"

namespace ofwer {

// JSON form of a procedure configuration:
//   {"procedure": "addis-spending", "alpha": 0.2,
//    "series": {"kind": "log-q", "q": 2} | {"kind": "explicit", "weights": [...]},
//    "tau": 0.5 | [...], "lambda": 0.25 | [...],
//    "lags": {"constant": 2} | {"list": [...]} | "from-batch-ids",
//    "fallback_weights": "lagged-gamma" | "one-step" | {"matrix": [[...], ...]},
//    "k": 1, "label": "..."}
// Every key but "procedure" is optional. Unknown keys are rejected. The alias
// "fallback-1" selects online-fallback with one-step weights.
// Throws InvalidParameter on malformed or out-of-range values.
ProcedureConfig procedure_from_json(const nlohmann::json& j);
nlohmann::json procedure_to_json(const ProcedureConfig& config);

ProcedureConfig procedure_from_json_text(const std::string& text);
// Reads a JSON file; throws InvalidParameter if it cannot be opened or parsed.
nlohmann::json read_json_file(const std::string& path);

SeriesSpec series_from_json(const nlohmann::json& j);
nlohmann::json series_to_json(const SeriesSpec& spec);

// Weights file: numbers separated by whitespace, commas or newlines.
std::vector<double> read_weights_file(const std::string& path);

}  // namespace ofwer
