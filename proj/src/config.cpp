#include "onlinefwer/config.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "onlinefwer/errors.hpp"

namespace ofwer {

std::string_view to_string(ProcedureKind kind) {
    switch (kind) {
        case ProcedureKind::alpha_spending: return "alpha-spending";
        case ProcedureKind::online_sidak: return "online-sidak";
        case ProcedureKind::online_fallback: return "online-fallback";
        case ProcedureKind::discard_spending: return "discard-spending";
        case ProcedureKind::adaptive_spending: return "adaptive-spending";
        case ProcedureKind::addis_spending: return "addis-spending";
        case ProcedureKind::addis_local: return "addis-local";
        case ProcedureKind::discard_sidak: return "discard-sidak";
        case ProcedureKind::adaptive_sidak: return "adaptive-sidak";
        case ProcedureKind::addis_sidak: return "addis-sidak";
        case ProcedureKind::discard_fallback: return "discard-fallback";
    }
    return "?";
}

ProcedureKind parse_procedure_kind(std::string_view name) {
    for (auto kind : kAllProcedureKinds)
        if (name == to_string(kind)) return kind;
    if (name == "discard") return ProcedureKind::discard_spending;
    if (name == "adaptive") return ProcedureKind::adaptive_spending;
    if (name == "addis") return ProcedureKind::addis_spending;
    if (name == "sidak") return ProcedureKind::online_sidak;
    if (name == "fallback" || name == "fallback-1") return ProcedureKind::online_fallback;
    throw InvalidParameter("unknown procedure '" + std::string(name) + "'");
}

bool controls_pfer(ProcedureKind kind) {
    switch (kind) {
        case ProcedureKind::alpha_spending:
        case ProcedureKind::discard_spending:
        case ProcedureKind::adaptive_spending:
        case ProcedureKind::addis_spending:
        case ProcedureKind::addis_local: return true;
        default: return false;
    }
}

bool uses_tau(ProcedureKind kind) {
    switch (kind) {
        case ProcedureKind::discard_spending:
        case ProcedureKind::addis_spending:
        case ProcedureKind::addis_local:
        case ProcedureKind::discard_sidak:
        case ProcedureKind::addis_sidak:
        case ProcedureKind::discard_fallback: return true;
        default: return false;
    }
}

bool uses_lambda(ProcedureKind kind) {
    switch (kind) {
        case ProcedureKind::adaptive_spending:
        case ProcedureKind::addis_spending:
        case ProcedureKind::addis_local:
        case ProcedureKind::adaptive_sidak:
        case ProcedureKind::addis_sidak: return true;
        default: return false;
    }
}

bool is_sidak_type(ProcedureKind kind) {
    return kind == ProcedureKind::online_sidak || kind == ProcedureKind::discard_sidak ||
           kind == ProcedureKind::adaptive_sidak || kind == ProcedureKind::addis_sidak;
}

bool is_fallback_type(ProcedureKind kind) {
    return kind == ProcedureKind::online_fallback || kind == ProcedureKind::discard_fallback;
}

namespace {

// Parametric series are immutable, so certified ones are shared.
WeightSeries parametric(SeriesKind kind, double q) {
    static std::mutex mutex;
    static std::map<std::pair<SeriesKind, double>, WeightSeries> built;
    const std::lock_guard lock(mutex);
    if (auto it = built.find({kind, q}); it != built.end()) return it->second;
    auto s = kind == SeriesKind::q_series ? WeightSeries::q_series(q) : WeightSeries::log_q_series(q);
    if (built.size() < 256) built.emplace(std::pair{kind, q}, s);
    return s;
}

}  // namespace

WeightSeries SeriesSpec::build() const {
    switch (kind) {
        case SeriesKind::q_series:
        case SeriesKind::log_q_series: return parametric(kind, q);
        case SeriesKind::explicit_list: return WeightSeries::explicit_weights(weights);
    }
    throw InvalidParameter("unknown series kind");
}

std::string ProcedureConfig::name() const {
    if (!label.empty()) return label;
    return std::string(to_string(kind));
}

Schedule default_tau(ProcedureKind kind) {
    return Schedule::constant(uses_tau(kind) ? 0.5 : 1.0);
}

Schedule default_lambda(ProcedureKind kind) {
    switch (kind) {
        case ProcedureKind::adaptive_spending:
        case ProcedureKind::adaptive_sidak: return Schedule::constant(0.5);
        case ProcedureKind::addis_spending:
        case ProcedureKind::addis_local:
        case ProcedureKind::addis_sidak: return Schedule::constant(0.25);
        default: return Schedule::constant(0.0);
    }
}

Schedule effective_tau(const ProcedureConfig& config) {
    return config.tau ? *config.tau : default_tau(config.kind);
}

Schedule effective_lambda(const ProcedureConfig& config) {
    return config.lambda ? *config.lambda : default_lambda(config.kind);
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Checks every statically known value of a schedule against a predicate.
template <class Pred>
bool all_known(const Schedule& s, Pred pred) {
    if (auto c = s.constant_value()) return pred(*c);
    if (const auto* vals = s.values()) {
        for (double v : *vals)
            if (!pred(v)) return false;
    }
    return true;
}

}  // namespace

namespace {

std::vector<std::string> validate_impl(const ProcedureConfig& config, const WeightSeries* prebuilt) {
    std::vector<std::string> findings;
    const auto kind = config.kind;

    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        findings.push_back("alpha must lie in (0,1), got " + fmt(config.alpha));
    if (config.k == 0) findings.push_back("k must be a positive integer");
    if (config.k > 1 && !controls_pfer(kind))
        findings.push_back(std::string(to_string(kind)) +
                           " does not control PFER, so k-FWER scaling is not valid");

    try {
        const auto series = prebuilt ? *prebuilt : config.series.build();
        if (kind == ProcedureKind::addis_local && !series.nonincreasing())
            findings.push_back("addis-local requires a nonincreasing weight series");
    } catch (const std::exception& e) {
        findings.push_back(std::string("series: ") + e.what());
    }

    const Schedule tau = effective_tau(config);
    const Schedule lambda = effective_lambda(config);

    if (config.tau && !uses_tau(kind) && !config.tau->is_identically(1.0))
        findings.push_back(std::string(to_string(kind)) + " does not discard; tau must be 1");
    if (config.lambda && !uses_lambda(kind) && !config.lambda->is_identically(0.0))
        findings.push_back(std::string(to_string(kind)) +
                           " does not use candidates; lambda must be 0");

    if (!all_known(tau, [](double t) { return t > 0.0 && t <= 1.0; }))
        findings.push_back("tau must lie in (0,1]");
    if (!all_known(lambda, [](double l) { return l >= 0.0 && l < 1.0; }))
        findings.push_back("lambda must lie in [0,1)");

    // lambda < tau, checked pointwise where both are known.
    const auto tc = tau.constant_value();
    const auto lc = lambda.constant_value();
    const auto* tv = tau.values();
    const auto* lv = lambda.values();
    auto tau_at = [&](std::size_t i) { return tc ? *tc : (*tv)[std::min(i, tv->size() - 1)]; };
    auto lam_at = [&](std::size_t i) { return lc ? *lc : (*lv)[std::min(i, lv->size() - 1)]; };
    if ((tc || tv) && (lc || lv) && uses_lambda(kind) && uses_tau(kind)) {
        const std::size_t n = std::max(tv ? tv->size() : 1, lv ? lv->size() : 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(lam_at(i) < tau_at(i))) {
                findings.push_back("lambda must be < tau (lambda = " + fmt(lam_at(i)) +
                                   ", tau = " + fmt(tau_at(i)) + ")");
                break;
            }
        }
    }

    // tau >= alpha for the discarding Sidak and fallback variants.
    if (kind == ProcedureKind::discard_sidak || kind == ProcedureKind::addis_sidak ||
        kind == ProcedureKind::discard_fallback) {
        if (!all_known(tau, [&](double t) { return t >= config.alpha; }))
            findings.push_back("tau must be >= alpha for " + std::string(to_string(kind)));
    }

    if (config.lags) {
        if (kind != ProcedureKind::addis_local)
            findings.push_back("lags are only supported by addis-local");
        else if (config.lags->kind() == LagSchedule::Kind::list) {
            if (auto bad = LagSchedule::first_inadmissible(config.lags->lags()))
                findings.push_back("lag schedule inadmissible at index " + std::to_string(*bad) +
                                   ": L_i > L_{i-1} + 1");
        }
    }

    if (config.fallback_weights.kind() != FallbackWeights::Kind::lagged_gamma &&
        !is_fallback_type(kind))
        findings.push_back("fallback weights given for a non-fallback procedure");
    return findings;
}

}  // namespace

std::vector<std::string> validate(const ProcedureConfig& config) {
    return validate_impl(config, nullptr);
}

std::vector<std::string> validate(const ProcedureConfig& config, const WeightSeries& series) {
    return validate_impl(config, &series);
}

void require_valid(const ProcedureConfig& config) {
    auto findings = validate(config);
    if (!findings.empty()) throw InvalidParameter(findings.front());
}

KFwerWrapped kfwer_wrap(ProcedureConfig inner, unsigned k) {
    if (k == 0) throw InvalidParameter("k must be a positive integer");
    if (!controls_pfer(inner.kind))
        throw InvalidParameter(std::string(to_string(inner.kind)) +
                               " does not control PFER; k-FWER wrapping needs a spending procedure");
    inner.k = k;
    KFwerWrapped out{std::move(inner), std::nullopt};
    if (out.config.budget() >= 1.0)
        out.warning = "k * alpha = " + fmt(out.config.budget()) +
                      " >= 1; levels will saturate just below tau and 1";
    return out;
}

}  // namespace ofwer
