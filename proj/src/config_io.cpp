#include "onlinefwer/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "onlinefwer/errors.hpp"

namespace ofwer {

using nlohmann::json;

namespace {

double number(const json& j, const std::string& key) {
    if (!j.is_number()) throw InvalidParameter("'" + key + "' must be a number");
    return j.get<double>();
}

std::size_t count(const json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw InvalidParameter("'" + key + "' must be a nonnegative integer");
    return j.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
    if (!j.is_array()) throw InvalidParameter("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, key));
    return out;
}

Schedule schedule_from(const json& j, const std::string& key) {
    if (j.is_number()) return Schedule::constant(j.get<double>());
    if (j.is_array()) return Schedule::sequence(numbers(j, key));
    throw InvalidParameter("'" + key + "' must be a number or an array of numbers");
}

json schedule_to(const Schedule& s, const std::string& key) {
    if (auto c = s.constant_value()) return *c;
    if (const auto* v = s.values()) return *v;
    throw InvalidParameter("'" + key + "' is a callback schedule and cannot be written as JSON");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw InvalidParameter("unknown key '" + key + "' in " + where);
}

LagSchedule lags_from(const json& j) {
    if (j.is_string()) {
        if (j == "from-batch-ids" || j == "batch") return LagSchedule::from_batch_ids();
        throw InvalidParameter("'lags' string must be \"from-batch-ids\"");
    }
    if (j.is_number_integer()) return LagSchedule::constant(count(j, "lags"));
    if (!j.is_object()) throw InvalidParameter("'lags' must be an object or \"from-batch-ids\"");
    reject_unknown(j, {"constant", "list", "from-batch-ids"}, "lags");
    if (j.size() != 1) throw InvalidParameter("'lags' needs exactly one of constant, list, from-batch-ids");
    if (j.contains("constant")) return LagSchedule::constant(count(j["constant"], "lags.constant"));
    if (j.contains("list")) {
        if (!j["list"].is_array()) throw InvalidParameter("'lags.list' must be an array");
        std::vector<std::size_t> lags;
        for (const auto& v : j["list"]) lags.push_back(count(v, "lags.list"));
        return LagSchedule::list(std::move(lags));
    }
    return LagSchedule::from_batch_ids();
}

FallbackWeights fallback_from(const json& j) {
    if (j.is_string()) {
        if (j == "lagged-gamma") return FallbackWeights::lagged_gamma();
        if (j == "one-step") return FallbackWeights::one_step();
        throw InvalidParameter("'fallback_weights' must be \"lagged-gamma\", \"one-step\" or {\"matrix\": ...}");
    }
    if (!j.is_object() || !j.contains("matrix"))
        throw InvalidParameter("'fallback_weights' must be \"lagged-gamma\", \"one-step\" or {\"matrix\": ...}");
    reject_unknown(j, {"matrix"}, "fallback_weights");
    if (!j["matrix"].is_array()) throw InvalidParameter("'fallback_weights.matrix' must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : j["matrix"]) rows.push_back(numbers(row, "fallback_weights.matrix"));
    return FallbackWeights::explicit_matrix(std::move(rows));
}

}  // namespace

SeriesSpec series_from_json(const json& j) {
    SeriesSpec spec;
    if (!j.is_object()) throw InvalidParameter("'series' must be an object");
    reject_unknown(j, {"kind", "q", "weights", "path"}, "series");
    const std::string kind = j.value("kind", std::string("log-q"));
    if (kind == "q" || kind == "q-series") {
        spec.kind = SeriesKind::q_series;
    } else if (kind == "log-q" || kind == "logq" || kind == "log-q-series") {
        spec.kind = SeriesKind::log_q_series;
    } else if (kind == "explicit") {
        spec.kind = SeriesKind::explicit_list;
        if (!j.contains("weights")) throw InvalidParameter("explicit series needs 'weights'");
        spec.weights = numbers(j["weights"], "series.weights");
    } else if (kind == "file") {
        spec.kind = SeriesKind::explicit_list;
        if (!j.contains("path") || !j["path"].is_string())
            throw InvalidParameter("file series needs a 'path'");
        spec.weights = read_weights_file(j["path"].get<std::string>());
    } else {
        throw InvalidParameter("unknown series kind '" + kind + "'");
    }
    if (j.contains("q")) {
        if (spec.kind == SeriesKind::explicit_list)
            throw InvalidParameter("'q' does not apply to an explicit series");
        spec.q = number(j["q"], "series.q");
    }
    return spec;
}

json series_to_json(const SeriesSpec& spec) {
    switch (spec.kind) {
        case SeriesKind::q_series: return {{"kind", "q"}, {"q", spec.q}};
        case SeriesKind::log_q_series: return {{"kind", "log-q"}, {"q", spec.q}};
        case SeriesKind::explicit_list: return {{"kind", "explicit"}, {"weights", spec.weights}};
    }
    return {};
}

ProcedureConfig procedure_from_json(const json& j) {
    if (!j.is_object()) throw InvalidParameter("procedure config must be a JSON object");
    reject_unknown(j,
                   {"procedure", "alpha", "series", "tau", "lambda", "lags", "fallback_weights", "k",
                    "label"},
                   "procedure config");
    if (!j.contains("procedure") || !j["procedure"].is_string())
        throw InvalidParameter("procedure config needs a 'procedure' name");

    ProcedureConfig c;
    const std::string name = j["procedure"].get<std::string>();
    c.kind = parse_procedure_kind(name);
    if (name == "fallback-1") {
        c.fallback_weights = FallbackWeights::one_step();
        c.label = "fallback-1";
    }
    if (j.contains("alpha")) c.alpha = number(j["alpha"], "alpha");
    if (j.contains("series")) c.series = series_from_json(j["series"]);
    if (j.contains("tau")) c.tau = schedule_from(j["tau"], "tau");
    if (j.contains("lambda")) c.lambda = schedule_from(j["lambda"], "lambda");
    if (j.contains("lags")) c.lags = lags_from(j["lags"]);
    if (j.contains("fallback_weights")) c.fallback_weights = fallback_from(j["fallback_weights"]);
    if (j.contains("k")) {
        const std::size_t k = count(j["k"], "k");
        if (k == 0 || k > 1'000'000) throw InvalidParameter("'k' must be a positive integer");
        c.k = static_cast<unsigned>(k);
    }
    if (j.contains("label")) {
        if (!j["label"].is_string()) throw InvalidParameter("'label' must be a string");
        c.label = j["label"].get<std::string>();
    }
    return c;
}

json procedure_to_json(const ProcedureConfig& c) {
    json j;
    j["procedure"] = std::string(to_string(c.kind));
    j["alpha"] = c.alpha;
    j["series"] = series_to_json(c.series);
    if (c.tau) j["tau"] = schedule_to(*c.tau, "tau");
    if (c.lambda) j["lambda"] = schedule_to(*c.lambda, "lambda");
    if (c.lags) {
        switch (c.lags->kind()) {
            case LagSchedule::Kind::constant: j["lags"] = {{"constant", c.lags->constant_lag()}}; break;
            case LagSchedule::Kind::list: j["lags"] = {{"list", c.lags->lags()}}; break;
            case LagSchedule::Kind::from_batch_ids: j["lags"] = "from-batch-ids"; break;
        }
    }
    switch (c.fallback_weights.kind()) {
        case FallbackWeights::Kind::lagged_gamma: break;
        case FallbackWeights::Kind::one_step: j["fallback_weights"] = "one-step"; break;
        case FallbackWeights::Kind::explicit_matrix:
            j["fallback_weights"] = {{"matrix", c.fallback_weights.rows()}};
            break;
    }
    if (c.k != 1) j["k"] = c.k;
    if (!c.label.empty()) j["label"] = c.label;
    return j;
}

ProcedureConfig procedure_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("invalid JSON: ") + e.what());
    }
    return procedure_from_json(j);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidParameter("invalid JSON in '" + path + "': " + e.what());
    }
}

std::vector<double> read_weights_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open weights file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    for (char& ch : text)
        if (ch == ',' || ch == ';') ch = ' ';
    std::istringstream tokens(text);
    std::vector<double> weights;
    std::string token;
    while (tokens >> token) {
        try {
            std::size_t used = 0;
            weights.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw InvalidParameter("weights file '" + path + "' has a non-numeric entry '" + token + "'");
        }
    }
    return weights;
}

}  // namespace ofwer
