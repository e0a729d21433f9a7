#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onlinefwer/config.hpp"

namespace ofwer {

// Counter-based generator: every draw is a hash of (seed, trial, index,
// channel), so a trial's stream does not depend on which thread produces it
// or on how many trials ran before it.
std::uint64_t splitmix64(std::uint64_t x);
// Uniform on (0,1), never exactly 0 or 1.
double counter_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t index,
                       std::uint64_t channel);

struct SimConfig {
    double pi_A = 0.5;               // probability of a non-null
    std::vector<double> pi_sequence;  // per-index pi_Ai; overrides pi_A when non-empty
    double mu_A = 4.0;
    std::vector<double> mu_sequence;  // per-index mu_Ai; overrides mu_A when non-empty
    double mu_N = 0.0;
    std::size_t T = 1000;
    double alpha = 0.2;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    // Condition on every hypothesis being null (targets strong FWER control).
    bool force_null = false;
    // Consecutive blocks of this size share one Gaussian draw; batch lags are
    // the positions inside a block.
    std::size_t block_size = 1;
    unsigned threads = 0;  // 0 = hardware concurrency

    double pi_at(std::size_t i) const;  // 1-based
    double mu_at(std::size_t i) const;
    // Throws InvalidParameter on an unusable configuration.
    void validate() const;
};

// pi_Ai = f for i <= floor(T r), 0 afterwards.
std::vector<double> clustered_pi(double f, double r, std::size_t T);

struct Stream {
    std::vector<double> p;
    std::vector<unsigned char> non_null;
    std::vector<std::size_t> lags;  // position within the dependence block
};

// Labels ~ Bernoulli(pi_Ai), Z_i = X_i + (mu_A or mu_N), P_i = Phi(-Z_i).
Stream gen_stream(const SimConfig& config, std::uint64_t trial);

struct MetricsReport {
    std::string procedure;
    std::size_t trials = 0;
    unsigned k = 1;
    double fwer = 0.0, fwer_se = 0.0;
    double pfer = 0.0, pfer_se = 0.0;
    double power = 0.0, power_se = 0.0;
    double fdr = 0.0, fdr_se = 0.0;
    double kfwer = 0.0, kfwer_se = 0.0;  // P(V >= k)
    double mean_rejections = 0.0;
    double mean_false = 0.0;
    std::size_t max_false = 0;
    std::size_t audited_traces = 0;
};

// Runs every procedure on the same streams. Each trace is audited as it is
// produced; a violated budget constraint throws AuditFailure. Results are
// identical for any thread count.
std::vector<MetricsReport> estimate_metrics(std::span<const ProcedureConfig> procedures,
                                            const SimConfig& config);
MetricsReport estimate_metrics(const ProcedureConfig& procedure, const SimConfig& config);

// sqrt(se_a^2 + se_b^2), for comparing two estimates.
double combined_se(double se_a, double se_b);

// Plot-ready table: procedure, pi_A, mu_A, mu_N, T, alpha, fwer, fwer_se, pfer,
// power, power_se, fdr, followed by any extra columns.
struct MetricsRow {
    MetricsReport report;
    double pi_A = 0.0;
    double mu_A = 0.0;
    double mu_N = 0.0;
    std::size_t T = 0;
    double alpha = 0.0;
    std::vector<double> extra;
};

void write_metrics_header(std::ostream& out, std::span<const std::string> extra_columns = {});
void write_metrics_row(std::ostream& out, const MetricsRow& row);

}  // namespace ofwer
