#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

namespace ofwer {

enum class SeriesKind { q_series, log_q_series, explicit_list };

std::string_view to_string(SeriesKind kind);

// Lower and upper bound on an infinite sum.
struct SumBracket {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
};

// A nonnegative weight sequence gamma_1, gamma_2, ... with sum at most one.
//
// The q- and log-q-series are normalized by their infinite sum, which is
// bracketed by a partial sum plus an Euler-Maclaurin tail enclosure; the upper
// end of the bracket is used as the normalizer so every partial sum of the
// weights stays <= 1. Explicit lists are used as given (no renormalization) and
// are zero past their end.
//
// Immutable after construction; copies share the precomputed weight table.
class WeightSeries {
public:
    static WeightSeries q_series(double q);
    static WeightSeries log_q_series(double q);
    static WeightSeries explicit_weights(std::vector<double> weights);

    SeriesKind kind() const { return kind_; }
    double exponent() const { return q_; }

    // Z such that gamma_i = u_i / Z; for explicit lists Z is the list sum.
    double normalizer() const { return normalizer_; }
    // Certified enclosure of sum_i u_i (explicit lists: a degenerate bracket).
    SumBracket normalizer_bracket() const { return bracket_; }

    // gamma_i for i >= 1; throws IndexError for i == 0.
    double weight(std::size_t i) const;

    // Unnormalized term u(t) and its derivative, extended to real t >= 1.
    double unnormalized(double t) const;
    double unnormalized_derivative(double t) const;
    // log u(exp(log_t)); stays finite where exp(log_t) overflows.
    double log_unnormalized_at(double log_t) const;
    // Closed-form integral of u over [t, infinity).
    double tail_integral(double t) const;

    // Number of nonzero-capable terms; SIZE_MAX for infinite series.
    std::size_t support_size() const;
    bool nonincreasing() const;

private:
    WeightSeries() = default;
    void certify();
    void fill_cache();

    SeriesKind kind_ = SeriesKind::q_series;
    double q_ = 0.0;
    double normalizer_ = 1.0;
    SumBracket bracket_;
    std::shared_ptr<const std::vector<double>> explicit_;
    std::shared_ptr<const std::vector<double>> cache_;
};

}  // namespace ofwer
