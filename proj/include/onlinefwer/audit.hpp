#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "onlinefwer/config.hpp"
#include "onlinefwer/decision.hpp"

namespace ofwer {

// Outcome of replaying the prefix budget constraints over a decision trace.
struct AuditReport {
    bool passed = true;
    std::size_t checked = 0;                    // decisions examined
    std::optional<std::size_t> first_violation;  // 1-based index
    std::string constraint;                     // name of the violated constraint
    std::string message;
    double max_usage = 0.0;  // largest prefix sum divided by its bound
};

// Relative slack allowed on every budget comparison (floating-point rounding).
inline constexpr double kAuditTolerance = 1e-12;

// Incremental auditor: feed decisions in order. Besides the budget sum of the
// procedure kind it checks that flags agree with p, level, tau and lambda.
// Stops recording at the first violation.
class TraceAuditor {
public:
    TraceAuditor(ProcedureKind kind, double alpha, unsigned k = 1);
    explicit TraceAuditor(const ProcedureConfig& config);

    // Returns false once a violation has been found. Throws InvalidInput when
    // indices are not contiguous from 1 (incomplete trace).
    bool observe(const Decision& d);
    const AuditReport& report() const { return report_; }

    // Name of the budget constraint for a kind, e.g. "sum_{S\\C} alpha_i/(tau_i-lambda_i) <= alpha".
    static std::string constraint_name(ProcedureKind kind);

private:
    bool fail(const Decision& d, std::string constraint, std::string message);
    double increment(const Decision& d) const;
    double transient(const Decision& d) const;

    ProcedureKind kind_;
    double alpha_;
    double bound_;
    double sum_ = 0.0;
    double compensation_ = 0.0;
    AuditReport report_;
};

AuditReport audit_trace(std::span<const Decision> trace, ProcedureKind kind, double alpha,
                        unsigned k = 1);
AuditReport audit_trace(std::span<const Decision> trace, const ProcedureConfig& config);

}  // namespace ofwer
