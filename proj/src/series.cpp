#include "onlinefwer/series.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "onlinefwer/errors.hpp"

namespace ofwer {

namespace {

constexpr std::size_t kCacheSize = 4096;
constexpr std::size_t kMaxCertifyTerms = std::size_t{1} << 26;
constexpr double kBracketRelWidth = 1e-13;
constexpr double kExplicitSlack = 1e-12;

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

void require_exponent(double q) {
    if (!(q > 1.0) || !std::isfinite(q))
        throw InvalidParameter("series exponent q must be finite and > 1, got " + std::to_string(q));
}

}  // namespace

std::string_view to_string(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::q_series: return "q";
        case SeriesKind::log_q_series: return "log-q";
        case SeriesKind::explicit_list: return "explicit";
    }
    return "?";
}

WeightSeries WeightSeries::q_series(double q) {
    require_exponent(q);
    WeightSeries s;
    s.kind_ = SeriesKind::q_series;
    s.q_ = q;
    s.certify();
    s.fill_cache();
    return s;
}

WeightSeries WeightSeries::log_q_series(double q) {
    require_exponent(q);
    WeightSeries s;
    s.kind_ = SeriesKind::log_q_series;
    s.q_ = q;
    s.certify();
    s.fill_cache();
    return s;
}

WeightSeries WeightSeries::explicit_weights(std::vector<double> weights) {
    if (weights.empty()) throw InvalidParameter("explicit series must contain at least one weight");
    CompensatedSum total;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InvalidParameter("explicit series weights must be finite and nonnegative");
        total.add(w);
    }
    if (total.value() > 1.0 + kExplicitSlack)
        throw InvalidParameter("explicit series weights sum to " + std::to_string(total.value()) +
                               " > 1");
    WeightSeries s;
    s.kind_ = SeriesKind::explicit_list;
    s.normalizer_ = total.value();
    s.bracket_ = {total.value(), total.value()};
    s.explicit_ = std::make_shared<const std::vector<double>>(std::move(weights));
    return s;
}

double WeightSeries::unnormalized(double t) const {
    switch (kind_) {
        case SeriesKind::q_series: return std::pow(t, -q_);
        case SeriesKind::log_q_series: {
            const double l = std::log1p(t);
            return 1.0 / ((t + 1.0) * std::pow(l, q_));
        }
        case SeriesKind::explicit_list: {
            const auto i = static_cast<std::size_t>(t);
            return (i >= 1 && i <= explicit_->size()) ? (*explicit_)[i - 1] : 0.0;
        }
    }
    return 0.0;
}

double WeightSeries::unnormalized_derivative(double t) const {
    switch (kind_) {
        case SeriesKind::q_series: return -q_ * std::pow(t, -q_ - 1.0);
        case SeriesKind::log_q_series: {
            const double l = std::log1p(t);
            return -unnormalized(t) * (1.0 + q_ / l) / (t + 1.0);
        }
        case SeriesKind::explicit_list: return 0.0;
    }
    return 0.0;
}

double WeightSeries::log_unnormalized_at(double log_t) const {
    switch (kind_) {
        case SeriesKind::q_series: return -q_ * log_t;
        case SeriesKind::log_q_series: {
            // log(t + 1) = log_t + log1p(exp(-log_t))
            const double l = log_t + std::log1p(std::exp(-log_t));
            return -l - q_ * std::log(l);
        }
        case SeriesKind::explicit_list: {
            const double u = unnormalized(std::exp(log_t));
            return u > 0.0 ? std::log(u) : -std::numeric_limits<double>::infinity();
        }
    }
    return 0.0;
}

double WeightSeries::tail_integral(double t) const {
    switch (kind_) {
        case SeriesKind::q_series: return std::pow(t, 1.0 - q_) / (q_ - 1.0);
        case SeriesKind::log_q_series: return std::pow(std::log1p(t), 1.0 - q_) / (q_ - 1.0);
        case SeriesKind::explicit_list: return 0.0;
    }
    return 0.0;
}

// Both infinite kinds have completely monotone terms, so the Euler-Maclaurin
// remainder after the f(M)/2 correction lies between 0 and -f'(M)/12:
//   sum_{i>=M} u(i) in [I(M) + u(M)/2, I(M) + u(M)/2 - u'(M)/12].
void WeightSeries::certify() {
    CompensatedSum partial;
    std::size_t m = 1;
    std::size_t target = 1024;
    while (true) {
        for (; m < target; ++m) partial.add(unnormalized(static_cast<double>(m)));
        const double mm = static_cast<double>(m);
        const double tail_lo = tail_integral(mm) + 0.5 * unnormalized(mm);
        const double tail_hi = tail_lo - unnormalized_derivative(mm) / 12.0;
        const double lo = partial.value() + tail_lo;
        const double hi = partial.value() + tail_hi;
        if (hi - lo <= kBracketRelWidth * lo) {
            bracket_ = {lo, hi};
            normalizer_ = hi;
            return;
        }
        if (target >= kMaxCertifyTerms)
            throw InvalidParameter("series normalizer could not be certified for q = " +
                                   std::to_string(q_));
        target *= 2;
    }
}

void WeightSeries::fill_cache() {
    auto table = std::make_shared<std::vector<double>>(kCacheSize);
    for (std::size_t i = 1; i <= kCacheSize; ++i)
        (*table)[i - 1] = unnormalized(static_cast<double>(i)) / normalizer_;
    cache_ = std::move(table);
}

double WeightSeries::weight(std::size_t i) const {
    if (i == 0) throw IndexError("series weights are indexed from 1");
    if (kind_ == SeriesKind::explicit_list)
        return i <= explicit_->size() ? (*explicit_)[i - 1] : 0.0;
    if (i <= cache_->size()) return (*cache_)[i - 1];
    return unnormalized(static_cast<double>(i)) / normalizer_;
}

std::size_t WeightSeries::support_size() const {
    return kind_ == SeriesKind::explicit_list ? explicit_->size()
                                              : std::numeric_limits<std::size_t>::max();
}

bool WeightSeries::nonincreasing() const {
    if (kind_ != SeriesKind::explicit_list) return true;
    for (std::size_t i = 1; i < explicit_->size(); ++i)
        if ((*explicit_)[i] > (*explicit_)[i - 1]) return false;
    return true;
}

}  // namespace ofwer
