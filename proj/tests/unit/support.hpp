#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "onlinefwer/config.hpp"
#include "onlinefwer/decision.hpp"

namespace testsupport {

// Mixture of near-zero, mid-range and uniform p-values, so rejections,
// candidates and discards all occur.
inline std::vector<double> fuzz_stream(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(n);
    for (auto& x : p) {
        const double kind = u(rng);
        if (kind < 0.25)
            x = u(rng) * 1e-3;
        else if (kind < 0.35)
            x = u(rng) * 0.05;
        else if (kind < 0.4)
            x = (kind < 0.37) ? 0.0 : 1.0;
        else
            x = u(rng);
    }
    return p;
}

inline std::size_t fuzz_length(std::uint64_t seed) { return 1 + seed % 97; }

inline ofwer::ProcedureConfig config(ofwer::ProcedureKind kind, double alpha = 0.2) {
    ofwer::ProcedureConfig c;
    c.kind = kind;
    c.alpha = alpha;
    return c;
}

inline ofwer::SeriesSpec q_series(double q) { return {ofwer::SeriesKind::q_series, q, {}}; }

inline std::vector<double> levels(const std::vector<ofwer::Decision>& trace) {
    std::vector<double> out;
    for (const auto& d : trace) out.push_back(d.level);
    return out;
}

inline std::vector<bool> rejections(const std::vector<ofwer::Decision>& trace) {
    std::vector<bool> out;
    for (const auto& d : trace) out.push_back(d.rejected);
    return out;
}

}  // namespace testsupport
