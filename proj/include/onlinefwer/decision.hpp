#pragma once

#include <cstddef>

namespace ofwer {

// Outcome of testing one hypothesis. Every step emits one record, including
// discarded hypotheses (selected == false), so index i sits at trace[i - 1].
struct Decision {
    std::size_t index = 0;  // 1-based
    double p_value = 0.0;
    double level = 0.0;     // alpha_i; rejection is inclusive (p <= level)
    double tau = 1.0;       // discarding threshold in force at this step
    double lambda = 0.0;    // candidate threshold in force at this step
    double beta = 0.0;      // weight spent: gamma_t, or the exponent beta_i for Sidak kinds
    bool selected = true;   // S_i
    bool candidate = false; // C_i
    bool rejected = false;  // R_i

    friend bool operator==(const Decision&, const Decision&) = default;
};

}  // namespace ofwer
