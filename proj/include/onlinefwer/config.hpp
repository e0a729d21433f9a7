#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "onlinefwer/schedule.hpp"
#include "onlinefwer/series.hpp"

namespace ofwer {

enum class ProcedureKind {
    alpha_spending,
    online_sidak,
    online_fallback,
    discard_spending,
    adaptive_spending,
    addis_spending,
    addis_local,
    discard_sidak,
    adaptive_sidak,
    addis_sidak,
    discard_fallback,
};

inline constexpr ProcedureKind kAllProcedureKinds[] = {
    ProcedureKind::alpha_spending,   ProcedureKind::online_sidak,
    ProcedureKind::online_fallback,  ProcedureKind::discard_spending,
    ProcedureKind::adaptive_spending, ProcedureKind::addis_spending,
    ProcedureKind::addis_local,      ProcedureKind::discard_sidak,
    ProcedureKind::adaptive_sidak,   ProcedureKind::addis_sidak,
    ProcedureKind::discard_fallback,
};

std::string_view to_string(ProcedureKind kind);
// Accepts the canonical names plus short aliases ("discard", "adaptive",
// "addis"); throws InvalidParameter for unknown names.
ProcedureKind parse_procedure_kind(std::string_view name);

// Procedures whose levels are budgeted so that PFER <= alpha.
bool controls_pfer(ProcedureKind kind);
bool uses_tau(ProcedureKind kind);
bool uses_lambda(ProcedureKind kind);
bool is_sidak_type(ProcedureKind kind);
bool is_fallback_type(ProcedureKind kind);

struct SeriesSpec {
    SeriesKind kind = SeriesKind::log_q_series;
    double q = 2.0;
    std::vector<double> weights;  // explicit lists only

    WeightSeries build() const;
};

struct ProcedureConfig {
    ProcedureKind kind = ProcedureKind::addis_spending;
    double alpha = 0.2;
    SeriesSpec series;
    // Unset thresholds take the per-procedure defaults (see default_tau/default_lambda).
    std::optional<Schedule> tau;
    std::optional<Schedule> lambda;
    std::optional<LagSchedule> lags;  // addis-local only; unset means L_i = 0
    FallbackWeights fallback_weights = FallbackWeights::lagged_gamma();
    unsigned k = 1;                   // k-FWER multiplier on the level budget
    std::string label;                // display name; defaults to the procedure name

    std::string name() const;
    double budget() const { return static_cast<double>(k) * alpha; }
};

// tau = 1/2 for discarding procedures, 1 otherwise; lambda = 1/4 for the
// ADDIS procedures, 1/2 for the adaptive ones, 0 otherwise.
Schedule default_tau(ProcedureKind kind);
Schedule default_lambda(ProcedureKind kind);
Schedule effective_tau(const ProcedureConfig& config);
Schedule effective_lambda(const ProcedureConfig& config);

// Static checks that need no data. Returns human-readable findings; an empty
// result means the configuration is usable.
std::vector<std::string> validate(const ProcedureConfig& config);
// Same, reusing an already built series instead of building config.series.
std::vector<std::string> validate(const ProcedureConfig& config, const WeightSeries& series);
// Throws InvalidParameter carrying the first finding.
void require_valid(const ProcedureConfig& config);

struct KFwerWrapped {
    ProcedureConfig config;
    std::optional<std::string> warning;
};

// Scales the level budget to k * alpha, which bounds P(V >= k) by alpha for
// procedures with PFER control. Throws InvalidParameter for k == 0 or for
// procedures without PFER control; warns when k * alpha >= 1 (levels saturate).
KFwerWrapped kfwer_wrap(ProcedureConfig inner, unsigned k);

}  // namespace ofwer
