#include "onlinefwer/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "onlinefwer/errors.hpp"

namespace ofwer {

Schedule Schedule::constant(double value) {
    Schedule s;
    s.kind_ = Kind::constant;
    s.value_ = value;
    return s;
}

Schedule Schedule::sequence(std::vector<double> values) {
    if (values.empty()) throw InvalidParameter("schedule sequence must not be empty");
    Schedule s;
    s.kind_ = Kind::sequence;
    s.values_ = std::move(values);
    return s;
}

Schedule Schedule::predictable(Callback fn) {
    if (!fn) throw InvalidParameter("schedule callback must be callable");
    Schedule s;
    s.kind_ = Kind::callback;
    s.callback_ = std::move(fn);
    return s;
}

double Schedule::at(std::size_t index, std::span<const Decision> visible) const {
    switch (kind_) {
        case Kind::constant: return value_;
        case Kind::sequence:
            if (index == 0 || index > values_.size())
                throw InvalidParameter("schedule sequence exhausted at index " +
                                       std::to_string(index));
            return values_[index - 1];
        case Kind::callback: return callback_(index, visible);
    }
    return value_;
}

std::optional<double> Schedule::constant_value() const {
    if (kind_ == Kind::constant) return value_;
    return std::nullopt;
}

const std::vector<double>* Schedule::values() const {
    return kind_ == Kind::sequence ? &values_ : nullptr;
}

bool Schedule::is_identically(double v) const {
    switch (kind_) {
        case Kind::constant: return value_ == v;
        case Kind::sequence:
            return std::all_of(values_.begin(), values_.end(), [v](double x) { return x == v; });
        case Kind::callback: return false;
    }
    return false;
}

LagSchedule LagSchedule::constant(std::size_t lag) {
    LagSchedule s;
    s.kind_ = Kind::constant;
    s.constant_ = lag;
    return s;
}

LagSchedule LagSchedule::list(std::vector<std::size_t> lags) {
    if (auto bad = first_inadmissible(lags))
        throw InvalidParameter("lag schedule inadmissible at index " + std::to_string(*bad) +
                               ": L_i > L_{i-1} + 1");
    LagSchedule s;
    s.kind_ = Kind::list;
    s.lags_ = std::move(lags);
    return s;
}

LagSchedule LagSchedule::from_batch_ids() {
    LagSchedule s;
    s.kind_ = Kind::from_batch_ids;
    return s;
}

std::size_t LagSchedule::lag(std::size_t index) const {
    if (index == 0) throw IndexError("lags are indexed from 1");
    switch (kind_) {
        case Kind::constant: return constant_;
        case Kind::list:
            if (index > lags_.size())
                throw InvalidParameter("lag list exhausted at index " + std::to_string(index));
            return lags_[index - 1];
        case Kind::from_batch_ids:
            throw InvalidParameter("batch-derived lags must be supplied with each observation");
    }
    return 0;
}

std::optional<std::size_t> LagSchedule::first_inadmissible(std::span<const std::size_t> lags) {
    for (std::size_t i = 1; i < lags.size(); ++i)
        if (lags[i] > lags[i - 1] + 1) return i + 1;
    return std::nullopt;
}

std::vector<std::size_t> LagSchedule::lags_from_batch_ids(std::span<const std::string> batch_ids) {
    BatchLagTracker tracker;
    std::vector<std::size_t> out;
    out.reserve(batch_ids.size());
    for (const auto& id : batch_ids) out.push_back(tracker.next(id));
    return out;
}

std::size_t BatchLagTracker::next(const std::string& batch_id) {
    if (started_ && batch_id == current_) return ++run_;
    if (std::find(finished_.begin(), finished_.end(), batch_id) != finished_.end())
        throw InvalidInput("batch id '" + batch_id + "' reappears after its run ended");
    if (started_) finished_.push_back(current_);
    current_ = batch_id;
    started_ = true;
    run_ = 0;
    return 0;
}

FallbackWeights FallbackWeights::lagged_gamma() { return FallbackWeights{}; }

FallbackWeights FallbackWeights::one_step() {
    FallbackWeights w;
    w.kind_ = Kind::one_step;
    return w;
}

FallbackWeights FallbackWeights::explicit_matrix(std::vector<std::vector<double>> rows) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < rows[k].size(); ++i) {
            const double w = rows[k][i];
            if (!(w >= 0.0) || !std::isfinite(w))
                throw InvalidParameter("fallback weights must be finite and nonnegative");
            if (i <= k && w != 0.0)
                throw InvalidParameter("fallback weight w_{" + std::to_string(k + 1) + "," +
                                       std::to_string(i + 1) + "} must be zero (i <= k)");
            total += w;
        }
        if (total > 1.0 + 1e-12)
            throw InvalidParameter("fallback weight row " + std::to_string(k + 1) + " sums to " +
                                   std::to_string(total) + " > 1");
    }
    FallbackWeights w;
    w.kind_ = Kind::explicit_matrix;
    w.rows_ = std::move(rows);
    return w;
}

double FallbackWeights::weight(std::size_t from, std::size_t to, const WeightSeries& series) const {
    if (to <= from) return 0.0;
    switch (kind_) {
        case Kind::lagged_gamma: return series.weight(to - from);
        case Kind::one_step: return to == from + 1 ? 1.0 : 0.0;
        case Kind::explicit_matrix:
            if (from > rows_.size()) return 0.0;
            {
                const auto& row = rows_[from - 1];
                return to <= row.size() ? row[to - 1] : 0.0;
            }
    }
    return 0.0;
}

bool FallbackWeights::exhausted(std::size_t from, std::size_t to) const {
    switch (kind_) {
        case Kind::lagged_gamma: return false;
        case Kind::one_step: return to > from + 1;
        case Kind::explicit_matrix: {
            if (from > rows_.size()) return true;
            const auto& row = rows_[from - 1];
            for (std::size_t j = to; j <= row.size(); ++j)
                if (row[j - 1] != 0.0) return false;
            return true;
        }
    }
    return false;
}

std::string to_string(FallbackWeights::Kind kind) {
    switch (kind) {
        case FallbackWeights::Kind::lagged_gamma: return "lagged-gamma";
        case FallbackWeights::Kind::one_step: return "one-step";
        case FallbackWeights::Kind::explicit_matrix: return "explicit";
    }
    return "?";
}

}  // namespace ofwer
