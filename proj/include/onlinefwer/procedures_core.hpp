#pragma once

#include <vector>

#include "onlinefwer/scheduler.hpp"

namespace ofwer {

// Online Bonferroni: alpha_i = alpha * gamma_i.
class AlphaSpending final : public Scheduler {
public:
    explicit AlphaSpending(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
};

// alpha_i = 1 - (1 - alpha)^{gamma_i}; valid under independence.
class OnlineSidak final : public Scheduler {
public:
    explicit OnlineSidak(ProcedureConfig config, SchedulerOptions options = {});

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;
};

// alpha_i = alpha * gamma_i + sum_{k<i} w_{k,i} R_k alpha_k.
//
// The full realized level of a rejection (itself possibly recycled) is passed
// on. With one-step weights this is the fallback recursion
// alpha_i = alpha * gamma_i + R_{i-1} alpha_{i-1}.
class OnlineFallback final : public Scheduler {
public:
    explicit OnlineFallback(ProcedureConfig config, SchedulerOptions options = {});

    struct LedgerEntry {
        std::size_t index;   // rejected hypothesis
        double level;        // its realized level
        double transferred;  // mass handed on so far
    };
    const std::vector<LedgerEntry>& ledger() const { return ledger_; }

private:
    Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) override;

    std::vector<LedgerEntry> ledger_;
};

}  // namespace ofwer
