#include "onlinefwer/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "onlinefwer/errors.hpp"
#include "onlinefwer/procedures_addis.hpp"
#include "onlinefwer/procedures_core.hpp"
#include "onlinefwer/procedures_variants.hpp"

namespace ofwer {

namespace {

WeightSeries resolve_series(const ProcedureConfig& config, const SchedulerOptions& options) {
    WeightSeries series = options.series ? *options.series : config.series.build();
    auto findings = validate(config, series);
    if (!findings.empty()) throw InvalidParameter(findings.front());
    return series;
}

}  // namespace

Scheduler::Scheduler(ProcedureConfig config, SchedulerOptions options)
    : config_(std::move(config)),
      series_(resolve_series(config_, options)),
      tau_(effective_tau(config_)),
      lambda_(effective_lambda(config_)),
      retain_trace_(options.retain_trace) {
    if (!retain_trace_ && (tau_.needs_history() || lambda_.needs_history()))
        throw InvalidParameter("callback schedules need the decision trace to be retained");
}

Decision Scheduler::step(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidInput("p-value must lie in [0,1], got " + std::to_string(p));
    return finish(p, compute(p, steps_ + 1, std::nullopt));
}

Decision Scheduler::step(double p, std::size_t lag) {
    if (!accepts_lag())
        throw InvalidParameter(config_.name() + " does not accept per-step lags");
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidInput("p-value must lie in [0,1], got " + std::to_string(p));
    return finish(p, compute(p, steps_ + 1, lag));
}

Decision Scheduler::finish(double p, Decision d) {
    d.index = steps_ + 1;
    d.p_value = p;
    d.rejected = d.selected && p <= d.level;
    if (!(d.level >= 0.0) || !(d.level < std::min(d.tau, 1.0)))
        throw AuditFailure("level " + std::to_string(d.level) + " at index " +
                           std::to_string(d.index) + " is outside [0, min(tau,1))");
    ++steps_;
    if (retain_trace_) trace_.push_back(d);
    return d;
}

std::span<const Decision> Scheduler::visible_before(std::size_t first_hidden) const {
    const std::size_t n = first_hidden == 0 ? 0 : std::min(first_hidden - 1, trace_.size());
    return std::span<const Decision>(trace_).first(n);
}

double Scheduler::tau_at(std::size_t index, std::span<const Decision> visible) const {
    const double t = tau_.at(index, visible);
    if (!(t > 0.0 && t <= 1.0))
        throw InvalidParameter("tau_" + std::to_string(index) + " = " + std::to_string(t) +
                               " is outside (0,1]");
    return t;
}

double Scheduler::lambda_at(std::size_t index, std::span<const Decision> visible) const {
    const double l = lambda_.at(index, visible);
    if (!(l >= 0.0 && l < 1.0))
        throw InvalidParameter("lambda_" + std::to_string(index) + " = " + std::to_string(l) +
                               " is outside [0,1)");
    return l;
}

double Scheduler::saturate(double level, double ceiling) const {
    if (level < ceiling) return level;
    if (config_.k > 1) return std::nextafter(ceiling, 0.0);
    throw InvalidParameter("level " + std::to_string(level) + " reaches its ceiling " +
                           std::to_string(ceiling));
}

std::unique_ptr<Scheduler> make_scheduler(const ProcedureConfig& config, SchedulerOptions options) {
    switch (config.kind) {
        case ProcedureKind::alpha_spending:
            return std::make_unique<AlphaSpending>(config, std::move(options));
        case ProcedureKind::online_sidak:
            return std::make_unique<OnlineSidak>(config, std::move(options));
        case ProcedureKind::online_fallback:
            return std::make_unique<OnlineFallback>(config, std::move(options));
        case ProcedureKind::discard_spending:
            return std::make_unique<DiscardSpending>(config, std::move(options));
        case ProcedureKind::adaptive_spending:
            return std::make_unique<AdaptiveSpending>(config, std::move(options));
        case ProcedureKind::addis_spending:
            return std::make_unique<AddisSpending>(config, std::move(options));
        case ProcedureKind::addis_local:
            return std::make_unique<AddisLocal>(config, std::move(options));
        case ProcedureKind::discard_sidak:
            return std::make_unique<DiscardSidak>(config, std::move(options));
        case ProcedureKind::adaptive_sidak:
            return std::make_unique<AdaptiveSidak>(config, std::move(options));
        case ProcedureKind::addis_sidak:
            return std::make_unique<AddisSidak>(config, std::move(options));
        case ProcedureKind::discard_fallback:
            return std::make_unique<DiscardFallback>(config, std::move(options));
    }
    throw InvalidParameter("unknown procedure kind");
}

std::vector<Decision> run_procedure(const ProcedureConfig& config, std::span<const double> p_values,
                                    std::span<const std::size_t> lags) {
    if (!lags.empty() && lags.size() != p_values.size())
        throw InvalidInput("lags must have one entry per p-value");
    auto scheduler = make_scheduler(config);
    for (std::size_t i = 0; i < p_values.size(); ++i) {
        if (lags.empty())
            scheduler->step(p_values[i]);
        else
            scheduler->step(p_values[i], lags[i]);
    }
    return {scheduler->trace().begin(), scheduler->trace().end()};
}

}  // namespace ofwer
