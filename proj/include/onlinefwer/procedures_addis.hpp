#pragma once

#include <deque>

#include "onlinefwer/scheduler.hpp"

namespace ofwer {

// Discard-Spending: alpha_i = alpha * tau_i * gamma_{t(i)}, t(i) = 1 + sum_{j<i} S_j.
// Hypotheses with p > tau_i are discarded and do not advance t.
class DiscardSpending final : public Scheduler {
public:
    explicit DiscardSpending(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
    std::size_t selected_ = 0;
};

// Adaptive-Spending: alpha_i = alpha * (1 - lambda_i) * gamma_{t(i)},
// t(i) = i - sum_{j<i} C_j. Candidates (p <= lambda_i) cost no budget.
class AdaptiveSpending final : public Scheduler {
public:
    explicit AdaptiveSpending(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
    std::size_t candidates_ = 0;
};

// ADDIS-Spending: alpha_i = alpha * (tau_i - lambda_i) * gamma_{t(i)},
// t(i) = 1 + sum_{j<i} (S_j - C_j).
class AddisSpending final : public Scheduler {
public:
    explicit AddisSpending(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
    std::size_t consumed_ = 0;  // sum (S_j - C_j)
};

// ADDIS-Spending under local dependence. Levels and thresholds depend only on
// decisions with index < i - L_i; the L_i ^ (i - 1) unseen steps are counted
// as if each had consumed a weight:
//   t(i) = 1 + min(L_i, i - 1) + sum_{j < i - L_i} (S_j - C_j).
class AddisLocal final : public Scheduler {
public:
    explicit AddisLocal(ProcedureConfig config, SchedulerOptions options = {});

    // Weight index used at the most recent step.
    std::size_t last_weight_index() const { return last_t_; }

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
    bool accepts_lag() const override { return true; }

    std::size_t committed_upto_ = 0;  // indices 1..committed_upto_ are folded into committed_
    std::size_t committed_ = 0;
    std::deque<unsigned char> pending_;  // S_j - C_j for j > committed_upto_
    std::optional<std::size_t> previous_lag_;
    std::size_t last_t_ = 0;
};

}  // namespace ofwer
