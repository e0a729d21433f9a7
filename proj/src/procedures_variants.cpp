#include "onlinefwer/procedures_variants.hpp"

#include <string>

#include "onlinefwer/errors.hpp"
#include "onlinefwer/normal.hpp"

namespace ofwer {

DiscardSidak::DiscardSidak(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision DiscardSidak::compute(double p, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    d.tau = tau_at(index, visible_before(index));
    d.beta = series().weight(1 + selected_);
    d.level = saturate(d.tau * sidak_level(config().alpha, d.beta), d.tau);
    d.selected = p <= d.tau;
    if (d.selected) ++selected_;
    return d;
}

AdaptiveSidak::AdaptiveSidak(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision AdaptiveSidak::compute(double p, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    d.lambda = lambda_at(index, visible_before(index));
    d.beta = (1.0 - d.lambda) * series().weight(index - candidates_);
    d.level = saturate(sidak_level(config().alpha, d.beta), 1.0);
    d.candidate = is_candidate(p, d.lambda);
    if (d.candidate) ++candidates_;
    return d;
}

AddisSidak::AddisSidak(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision AddisSidak::compute(double p, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    const auto visible = visible_before(index);
    d.tau = tau_at(index, visible);
    d.lambda = lambda_at(index, visible);
    if (!(d.lambda < d.tau) || d.tau < config().alpha)
        throw InvalidParameter("addis-sidak needs max(lambda, alpha) <= tau with lambda < tau at index " +
                               std::to_string(index));
    // A selected conservative null is a non-candidate with probability at least (tau - lambda)/tau.
    d.beta = (d.tau - d.lambda) / d.tau * series().weight(1 + consumed_);
    d.level = saturate(d.tau * sidak_level(config().alpha, d.beta), d.tau);
    d.selected = p <= d.tau;
    d.candidate = is_candidate(p, d.lambda);
    if (d.selected && !d.candidate) ++consumed_;
    return d;
}

DiscardFallback::DiscardFallback(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision DiscardFallback::compute(double p, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    d.tau = tau_at(index, visible_before(index));
    if (d.tau < config().alpha)
        throw InvalidParameter("discard-fallback needs tau >= alpha at index " +
                               std::to_string(index));
    const std::size_t position = 1 + selected_;
    const auto& weights = config().fallback_weights;
    double recycled = 0.0;
    for (const auto& e : ledger_) recycled += weights.weight(e.position, position, series()) * e.level;

    d.beta = series().weight(position);
    d.level = saturate(d.tau * (budget() * d.beta + recycled), d.tau);
    d.selected = p <= d.tau;
    if (d.selected) {
        ++selected_;
        std::erase_if(ledger_, [&](const Entry& e) { return weights.exhausted(e.position, position + 1); });
        if (p <= d.level) ledger_.push_back({position, d.level});
    }
    return d;
}

}  // namespace ofwer
