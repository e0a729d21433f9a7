#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onlinefwer/decision.hpp"
#include "onlinefwer/series.hpp"

namespace ofwer {

// A predictable threshold sequence (tau_i or lambda_i).
//
// Callback schedules receive only the part of the trace they are allowed to
// depend on: decisions strictly before i, or before i - L_i under lags.
class Schedule {
public:
    using Callback = std::function<double(std::size_t index, std::span<const Decision> visible)>;

    static Schedule constant(double value);
    static Schedule sequence(std::vector<double> values);
    static Schedule predictable(Callback fn);

    double at(std::size_t index, std::span<const Decision> visible) const;

    std::optional<double> constant_value() const;
    const std::vector<double>* values() const;
    bool needs_history() const { return static_cast<bool>(callback_); }

    // True when every value the schedule can produce is known and equals v.
    bool is_identically(double v) const;

private:
    enum class Kind { constant, sequence, callback };
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    std::vector<double> values_;
    Callback callback_;
};

// Local-dependence lags L_1, L_2, ... with L_{i+1} <= L_i + 1.
class LagSchedule {
public:
    enum class Kind { constant, list, from_batch_ids };

    static LagSchedule constant(std::size_t lag);
    static LagSchedule list(std::vector<std::size_t> lags);
    // Lags are supplied per step by the caller (see lags_from_batch_ids).
    static LagSchedule from_batch_ids();

    Kind kind() const { return kind_; }
    // L_i for i >= 1; not available for from_batch_ids.
    std::size_t lag(std::size_t index) const;
    std::size_t constant_lag() const { return constant_; }
    const std::vector<std::size_t>& lags() const { return lags_; }

    // First index i (1-based) with L_i > L_{i-1} + 1, if any.
    static std::optional<std::size_t> first_inadmissible(std::span<const std::size_t> lags);

    // L_i = number of earlier items in the same contiguous batch. Throws
    // InvalidInput if a batch id reappears after its run ended.
    static std::vector<std::size_t> lags_from_batch_ids(std::span<const std::string> batch_ids);

private:
    Kind kind_ = Kind::constant;
    std::size_t constant_ = 0;
    std::vector<std::size_t> lags_;
};

// Online streaming conversion of batch ids to lags.
class BatchLagTracker {
public:
    // Returns L_i for the next item; throws InvalidInput on a non-contiguous batch.
    std::size_t next(const std::string& batch_id);

private:
    std::string current_;
    std::size_t run_ = 0;
    bool started_ = false;
    std::vector<std::string> finished_;
};

// Transfer weights w_{k,i} (i > k) used to recycle the level of a rejection.
class FallbackWeights {
public:
    enum class Kind { lagged_gamma, one_step, explicit_matrix };

    static FallbackWeights lagged_gamma();
    static FallbackWeights one_step();
    // rows[k-1][i-1] = w_{k,i}; entries with i <= k must be zero, rows sum <= 1.
    // Weights outside the matrix (beyond its horizon) are zero.
    static FallbackWeights explicit_matrix(std::vector<std::vector<double>> rows);

    Kind kind() const { return kind_; }
    double weight(std::size_t from, std::size_t to, const WeightSeries& series) const;
    // True once w_{from, j} = 0 for every j >= to.
    bool exhausted(std::size_t from, std::size_t to) const;
    const std::vector<std::vector<double>>& rows() const { return rows_; }

private:
    Kind kind_ = Kind::lagged_gamma;
    std::vector<std::vector<double>> rows_;
};

std::string to_string(FallbackWeights::Kind kind);

}  // namespace ofwer
