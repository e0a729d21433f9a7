#pragma once

#include <vector>

#include "onlinefwer/scheduler.hpp"

namespace ofwer {

// Sidak procedures with discarding and/or adaptivity. Each spends an exponent
// budget beta_i with the same index advancement as its Spending counterpart,
// so every gamma index is consumed at most once by a budgeted step.

// alpha_i = tau_i (1 - (1-alpha)^{beta_i}), beta_i = gamma_{1 + sum_{j<i} S_j}.
class DiscardSidak final : public Scheduler {
public:
    explicit DiscardSidak(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
    std::size_t selected_ = 0;
};

// alpha_i = 1 - (1-alpha)^{beta_i}, beta_i = (1 - lambda_i) gamma_{i - sum_{j<i} C_j}.
class AdaptiveSidak final : public Scheduler {
public:
    explicit AdaptiveSidak(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
    std::size_t candidates_ = 0;
};

// alpha_i = tau_i (1 - (1-alpha)^{beta_i}),
// beta_i = (tau_i - lambda_i)/tau_i gamma_{1 + sum_{j<i} (S_j - C_j)}.
class AddisSidak final : public Scheduler {
public:
    explicit AddisSidak(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
    std::size_t consumed_ = 0;
};

// Fallback run on the selected subsequence:
//   alpha_i = tau_i (alpha gamma_{s} + sum_m w_{m,s} R_m alpha_m),
// where s = 1 + sum_{j<i} S_j is the position i would take among selected
// hypotheses and m ranges over positions of earlier selected rejections.
class DiscardFallback final : public Scheduler {
public:
    explicit DiscardFallback(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;

    struct Entry {
        std::size_t position;
        double level;
    };
    std::size_t selected_ = 0;
    std::vector<Entry> ledger_;
};

}  // namespace ofwer
