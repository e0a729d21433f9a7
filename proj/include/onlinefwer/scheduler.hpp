#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "onlinefwer/config.hpp"
#include "onlinefwer/decision.hpp"
#include "onlinefwer/series.hpp"

namespace ofwer {

struct SchedulerOptions {
    // Keep the full decision trace. Callback schedules need it; streaming
    // consumers without callbacks can turn it off for constant memory.
    bool retain_trace = true;
    // Prebuilt weight series matching config.series; skips re-certifying the
    // normalizer when many schedulers share one configuration.
    std::optional<WeightSeries> series;
};

// Stateful online testing procedure. Each call to step() tests the next
// hypothesis at a level computed only from earlier decisions and appends the
// decision to the trace. Steps are strictly sequential; distinct schedulers
// are independent and may run on different threads.
class Scheduler {
public:
    virtual ~Scheduler() = default;
    Scheduler(const Scheduler&) = delete;
    Scheduler& operator=(const Scheduler&) = delete;

    // Tests the next hypothesis. Throws InvalidInput for p outside [0,1].
    Decision step(double p);
    // Same, with the local-dependence lag L_i supplied by the caller (batch
    // derived lags). Only addis-local accepts an explicit lag.
    Decision step(double p, std::size_t lag);

    // Decisions emitted so far (empty when the trace is not retained).
    std::span<const Decision> trace() const { return trace_; }
    std::size_t steps() const { return steps_; }
    const ProcedureConfig& config() const { return config_; }
    const WeightSeries& series() const { return series_; }
    double budget() const { return config_.budget(); }

protected:
    Scheduler(ProcedureConfig config, SchedulerOptions options);

    // Fills level/tau/lambda/beta/selected/candidate for hypothesis `index`.
    virtual Decision compute(double p, std::size_t index, std::optional<std::size_t> lag) = 0;
    virtual bool accepts_lag() const { return false; }

    // Decisions with index < `first_hidden` (what a schedule may look at).
    std::span<const Decision> visible_before(std::size_t first_hidden) const;
    double tau_at(std::size_t index, std::span<const Decision> visible) const;
    double lambda_at(std::size_t index, std::span<const Decision> visible) const;
    // Levels must stay strictly below `ceiling` (min of tau and 1). Under
    // k-FWER scaling they saturate just below it; otherwise it is an error.
    double saturate(double level, double ceiling) const;

    static bool is_candidate(double p, double lambda) { return lambda > 0.0 && p <= lambda; }

private:
    Decision finish(double p, Decision d);

    ProcedureConfig config_;
    WeightSeries series_;
    Schedule tau_;
    Schedule lambda_;
    bool retain_trace_;
    std::size_t steps_ = 0;
    std::vector<Decision> trace_;
};


// Validates the configuration and builds the matching scheduler.
std::unique_ptr<Scheduler> make_scheduler(const ProcedureConfig& config,
                                          SchedulerOptions options = {});

// Convenience: runs a fresh scheduler over a whole stream. `lags`, when
// non-empty, must have one entry per p-value and is passed to addis-local.
std::vector<Decision> run_procedure(const ProcedureConfig& config, std::span<const double> p_values,
                                    std::span<const std::size_t> lags = {});

}  // namespace ofwer
