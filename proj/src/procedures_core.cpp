#include "onlinefwer/procedures_core.hpp"

#include <algorithm>

#include "onlinefwer/normal.hpp"

namespace ofwer {

AlphaSpending::AlphaSpending(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision AlphaSpending::compute(double, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    const double gamma = series().weight(index);
    d.beta = gamma;
    d.level = saturate(budget() * gamma, 1.0);
    return d;
}

OnlineSidak::OnlineSidak(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision OnlineSidak::compute(double, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    d.beta = series().weight(index);
    d.level = saturate(sidak_level(config().alpha, d.beta), 1.0);
    return d;
}

OnlineFallback::OnlineFallback(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision OnlineFallback::compute(double p, std::size_t index, std::optional<std::size_t>) {
    const auto& weights = config().fallback_weights;
    double recycled = 0.0;
    for (auto& e : ledger_) {
        const double share = weights.weight(e.index, index, series()) * e.level;
        recycled += share;
        e.transferred += share;
    }
    std::erase_if(ledger_, [&](const LedgerEntry& e) { return weights.exhausted(e.index, index + 1); });

    Decision d;
    d.beta = series().weight(index);
    d.level = saturate(budget() * d.beta + recycled, 1.0);
    if (p <= d.level) ledger_.push_back({index, d.level, 0.0});
    return d;
}

}  // namespace ofwer
