#include "onlinefwer/audit.hpp"

#include <cmath>
#include <sstream>

#include "onlinefwer/errors.hpp"

namespace ofwer {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Exponent beta with level = scale * (1 - (1-alpha)^beta).
double implied_beta(double level, double scale, double alpha) {
    return std::log1p(-level / scale) / std::log1p(-alpha);
}

}  // namespace

TraceAuditor::TraceAuditor(ProcedureKind kind, double alpha, unsigned k)
    : kind_(kind), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    if (k == 0) throw InvalidParameter("k must be positive");
    if (is_sidak_type(kind))
        bound_ = 1.0;
    else if (is_fallback_type(kind))
        bound_ = alpha;
    else
        bound_ = static_cast<double>(k) * alpha;
}

TraceAuditor::TraceAuditor(const ProcedureConfig& config)
    : TraceAuditor(config.kind, config.alpha, config.k) {}

std::string TraceAuditor::constraint_name(ProcedureKind kind) {
    switch (kind) {
        case ProcedureKind::alpha_spending: return "sum alpha_i <= alpha";
        case ProcedureKind::online_sidak: return "prod (1 - alpha_i) >= 1 - alpha";
        case ProcedureKind::online_fallback: return "sum_{i<n, not R} alpha_i + alpha_n <= alpha";
        case ProcedureKind::discard_spending: return "sum_{S} alpha_i/tau_i <= alpha";
        case ProcedureKind::adaptive_spending: return "sum_{not C} alpha_i/(1-lambda_i) <= alpha";
        case ProcedureKind::addis_spending:
        case ProcedureKind::addis_local: return "sum_{S\\C} alpha_i/(tau_i-lambda_i) <= alpha";
        case ProcedureKind::discard_sidak: return "sum_{S} beta_j <= 1";
        case ProcedureKind::adaptive_sidak: return "sum_{not C} beta_j/(1-lambda_j) <= 1";
        case ProcedureKind::addis_sidak: return "sum_{S\\C} beta_j tau_j/(tau_j-lambda_j) <= 1";
        case ProcedureKind::discard_fallback:
            return "sum_{i<n, S, not R} alpha_i/tau_i + alpha_n/tau_n <= alpha";
    }
    return "?";
}

double TraceAuditor::increment(const Decision& d) const {
    const bool budgeted = d.selected && !d.candidate;
    switch (kind_) {
        case ProcedureKind::alpha_spending: return d.level;
        case ProcedureKind::online_sidak: return implied_beta(d.level, 1.0, alpha_);
        case ProcedureKind::online_fallback: return d.rejected ? 0.0 : d.level;
        case ProcedureKind::discard_spending: return d.selected ? d.level / d.tau : 0.0;
        case ProcedureKind::adaptive_spending: return d.candidate ? 0.0 : d.level / (1.0 - d.lambda);
        case ProcedureKind::addis_spending:
        case ProcedureKind::addis_local: return budgeted ? d.level / (d.tau - d.lambda) : 0.0;
        case ProcedureKind::discard_sidak:
            return d.selected ? implied_beta(d.level, d.tau, alpha_) : 0.0;
        case ProcedureKind::adaptive_sidak:
            return d.candidate ? 0.0 : implied_beta(d.level, 1.0, alpha_) / (1.0 - d.lambda);
        case ProcedureKind::addis_sidak:
            return budgeted ? implied_beta(d.level, d.tau, alpha_) * d.tau / (d.tau - d.lambda) : 0.0;
        case ProcedureKind::discard_fallback:
            return d.selected && !d.rejected ? d.level / d.tau : 0.0;
    }
    return 0.0;
}

// A rejected fallback level may be recycled later, so it leaves the sum only
// after its own step has been checked.
double TraceAuditor::transient(const Decision& d) const {
    if (!d.rejected) return 0.0;
    if (kind_ == ProcedureKind::online_fallback) return d.level;
    if (kind_ == ProcedureKind::discard_fallback) return d.level / d.tau;
    return 0.0;
}

bool TraceAuditor::fail(const Decision& d, std::string constraint, std::string message) {
    report_.passed = false;
    report_.first_violation = d.index;
    report_.constraint = std::move(constraint);
    report_.message = "index " + std::to_string(d.index) + ": " + std::move(message);
    return false;
}

bool TraceAuditor::observe(const Decision& d) {
    if (!report_.passed) return false;
    if (d.index != report_.checked + 1)
        throw InvalidInput("incomplete trace: expected index " +
                           std::to_string(report_.checked + 1) + ", got " + std::to_string(d.index));
    ++report_.checked;

    if (!(d.p_value >= 0.0 && d.p_value <= 1.0))
        return fail(d, "p in [0,1]", "p = " + fmt(d.p_value));
    if (!(d.tau > 0.0 && d.tau <= 1.0)) return fail(d, "tau in (0,1]", "tau = " + fmt(d.tau));
    if (!(d.lambda >= 0.0 && d.lambda < 1.0))
        return fail(d, "lambda in [0,1)", "lambda = " + fmt(d.lambda));
    if (!(d.level >= 0.0 && d.level < std::fmin(d.tau, 1.0)))
        return fail(d, "0 <= alpha_i < min(tau_i, 1)",
                    "alpha_i = " + fmt(d.level) + ", tau_i = " + fmt(d.tau));
    if (!uses_tau(kind_) && (d.tau != 1.0 || !d.selected))
        return fail(d, "no discarding", "tau_i = " + fmt(d.tau));
    if (!uses_lambda(kind_) && (d.lambda != 0.0 || d.candidate))
        return fail(d, "no candidates", "lambda_i = " + fmt(d.lambda));
    if (uses_lambda(kind_) && uses_tau(kind_) && !(d.lambda < d.tau))
        return fail(d, "lambda_i < tau_i", "lambda_i = " + fmt(d.lambda) + ", tau_i = " + fmt(d.tau));
    if (d.selected != (d.p_value <= d.tau))
        return fail(d, "S_i = 1{p <= tau_i}", "selected flag disagrees with p and tau");
    if (d.candidate != (d.lambda > 0.0 && d.p_value <= d.lambda))
        return fail(d, "C_i = 1{p <= lambda_i}", "candidate flag disagrees with p and lambda");
    if (d.rejected != (d.selected && d.p_value <= d.level))
        return fail(d, "R_i = S_i 1{p <= alpha_i}", "rejected flag disagrees with p and level");

    // Neumaier summation of the budget usage.
    const double x = increment(d);
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
        compensation_ += (sum_ - t) + x;
    else
        compensation_ += (x - t) + sum_;
    sum_ = t;
    const double used = sum_ + compensation_ + transient(d);
    report_.max_usage = std::fmax(report_.max_usage, used / bound_);
    if (!(used <= bound_ * (1.0 + kAuditTolerance)))
        return fail(d, constraint_name(kind_),
                    "prefix sum " + fmt(used) + " exceeds bound " + fmt(bound_));
    return true;
}

AuditReport audit_trace(std::span<const Decision> trace, ProcedureKind kind, double alpha,
                        unsigned k) {
    TraceAuditor auditor(kind, alpha, k);
    for (const auto& d : trace)
        if (!auditor.observe(d)) break;
    return auditor.report();
}

AuditReport audit_trace(std::span<const Decision> trace, const ProcedureConfig& config) {
    return audit_trace(trace, config.kind, config.alpha, config.k);
}

}  // namespace ofwer
