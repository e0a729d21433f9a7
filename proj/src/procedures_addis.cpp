#include "onlinefwer/procedures_addis.hpp"

#include <algorithm>
#include <string>

#include "onlinefwer/errors.hpp"

namespace ofwer {

namespace {

void require_gap(std::size_t index, double lambda, double tau) {
    if (!(lambda < tau))
        throw InvalidParameter("lambda_" + std::to_string(index) + " = " + std::to_string(lambda) +
                               " must be < tau_" + std::to_string(index) + " = " +
                               std::to_string(tau));
}

}  // namespace

DiscardSpending::DiscardSpending(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision DiscardSpending::compute(double p, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    d.tau = tau_at(index, visible_before(index));
    d.beta = series().weight(1 + selected_);
    d.level = saturate(budget() * d.tau * d.beta, d.tau);
    d.selected = p <= d.tau;
    if (d.selected) ++selected_;
    return d;
}

AdaptiveSpending::AdaptiveSpending(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision AdaptiveSpending::compute(double p, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    d.lambda = lambda_at(index, visible_before(index));
    d.beta = series().weight(index - candidates_);
    d.level = saturate(budget() * (1.0 - d.lambda) * d.beta, 1.0);
    d.candidate = is_candidate(p, d.lambda);
    if (d.candidate) ++candidates_;
    return d;
}

AddisSpending::AddisSpending(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision AddisSpending::compute(double p, std::size_t index, std::optional<std::size_t>) {
    Decision d;
    const auto visible = visible_before(index);
    d.tau = tau_at(index, visible);
    d.lambda = lambda_at(index, visible);
    require_gap(index, d.lambda, d.tau);
    d.beta = series().weight(1 + consumed_);
    d.level = saturate(budget() * (d.tau - d.lambda) * d.beta, d.tau);
    d.selected = p <= d.tau;
    d.candidate = is_candidate(p, d.lambda);
    if (d.selected && !d.candidate) ++consumed_;
    return d;
}

AddisLocal::AddisLocal(ProcedureConfig config, SchedulerOptions options)
    : Scheduler(std::move(config), std::move(options)) {}

Decision AddisLocal::compute(double p, std::size_t index, std::optional<std::size_t> lag) {
    std::size_t L = 0;
    if (lag) {
        L = *lag;
    } else if (const auto& lags = config().lags) {
        if (lags->kind() == LagSchedule::Kind::from_batch_ids)
            throw InvalidParameter("lags from batch ids must be supplied with each step");
        L = lags->lag(index);
    }
    if (previous_lag_ && L > *previous_lag_ + 1)
        throw InvalidParameter("lag L_" + std::to_string(index) + " = " + std::to_string(L) +
                               " exceeds L_{i-1} + 1 = " + std::to_string(*previous_lag_ + 1));

    const std::size_t hidden = std::min(L, index - 1);
    const std::size_t target = index - 1 - hidden;  // indices 1..target are visible
    while (committed_upto_ < target) {
        committed_ += pending_.front();
        pending_.pop_front();
        ++committed_upto_;
    }

    Decision d;
    const auto visible = visible_before(target + 1);
    d.tau = tau_at(index, visible);
    d.lambda = lambda_at(index, visible);
    require_gap(index, d.lambda, d.tau);
    last_t_ = 1 + hidden + committed_;
    d.beta = series().weight(last_t_);
    d.level = saturate(budget() * (d.tau - d.lambda) * d.beta, d.tau);
    d.selected = p <= d.tau;
    d.candidate = is_candidate(p, d.lambda);
    pending_.push_back(d.selected && !d.candidate ? 1 : 0);
    previous_lag_ = L;
    return d;
}

}  // namespace ofwer
