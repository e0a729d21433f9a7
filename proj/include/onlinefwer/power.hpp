#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "onlinefwer/series.hpp"

namespace ofwer {

// Gaussian mean testing model: Z = X + mu, X ~ N(0,1), with mu = mu_A for a
// non-null (probability pi_A) and mu = mu_N <= 0 for a null.
struct GaussianMixModel {
    double pi_A = 0.5;
    double mu_A = 4.0;
    double mu_N = 0.0;

    // Throws InvalidParameter unless pi_A in (0,1), mu_A > 0 and mu_N <= 0.
    void validate() const;
};

inline constexpr std::size_t kInfiniteHorizon = std::numeric_limits<std::size_t>::max();

struct DiscoveryEstimate {
    double value = 0.0;
    double error_bound = 0.0;  // bound on |value - exact| from truncation and quadrature
};

// E_N[D] = sum_{i<=N} pi_A Phi(Phi^{-1}(alpha gamma_i) + mu_A), the expected
// number of true discoveries of Alpha-Spending. N = kInfiniteHorizon gives E[D].
// Long horizons are summed directly up to some M and the rest is an
// Euler-Maclaurin tail whose integral is taken in log t.
DiscoveryEstimate expected_true_discoveries_bounded(std::size_t N, double alpha,
                                                    const WeightSeries& series, double pi_A,
                                                    double mu_A);
double expected_true_discoveries(std::size_t N, double alpha, const WeightSeries& series,
                                 double pi_A, double mu_A);

// d E_N[D] / dq for the q-series (pi_A = 1), from
// d gamma_i / dq = gamma_i (-log i + sum_j log(j) j^{-q} / zeta(q)).
double expected_discoveries_dq(std::size_t N, double mu_A, double alpha, double q);

struct OptimalQ {
    double q = 0.0;
    double value = 0.0;  // E_N[D] at q
    double q_max = 0.0;  // upper end of the final search bracket
};

// Maximizer of E_N[D] over q-series exponents q in (1, q_max], by golden
// section to |dq| < tol. The bracket is doubled while the maximizer sits at its
// upper edge. Requires N >= 2 and alpha < 1/2.
OptimalQ optimal_q(std::size_t N, double mu_A, double alpha, double q_max = 50.0,
                   double tol = 1e-6);

// J(x) = x - G(x), G the mixture CDF of p-values under the model. Evaluated
// in complementary form for x > 1/2.
double cstar_objective(double x, const GaussianMixModel& model);

// Interior zero of J, below which J < 0 and above which J > 0. Returns exactly
// 1 when no zero exists below 1 - 1e-9 (e.g. mu_N = 0).
double cstar_threshold(const GaussianMixModel& model);

struct OptimalGamma {
    std::vector<double> weights;
    double eta = 0.0;  // Lagrange multiplier
};

// Alpha-Spending weights maximizing sum_i pi_i Phi(Phi^{-1}(alpha gamma_i) + mu_i)
// subject to sum_{i<=horizon} gamma_i = 1:
//   gamma_i = Phi(-h_i(eta)) / alpha,  h_i(eta) = log(eta / pi_i) / mu_i + mu_i / 2,
// with eta found by bisection in log eta. `pi` and `mu` have `horizon` entries
// or a single entry that is broadcast. Throws Infeasible if no eta balances the sum.
OptimalGamma optimal_gamma_varying(std::span<const double> pi, std::span<const double> mu,
                                   double alpha, std::size_t horizon);

}  // namespace ofwer
