#include "onlinefwer/power.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "onlinefwer/errors.hpp"
#include "onlinefwer/normal.hpp"

namespace ofwer {

namespace {

constexpr std::size_t kDirectLimit = std::size_t{1} << 22;
constexpr std::size_t kTailStart = 4096;
constexpr std::size_t kTailStartMax = std::size_t{1} << 24;
constexpr double kAbsTarget = 1e-9;
constexpr double kRelTarget = 1e-12;

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

// Expected true discoveries contributed by one index, and its t-derivative,
// for a term with alpha * gamma(t) continuous in t.
class DiscoveryTerm {
public:
    DiscoveryTerm(double alpha, const WeightSeries& series, double pi_A, double mu_A)
        : alpha_(alpha), series_(series), pi_(pi_A), mu_(mu_A),
          log_scale_(std::log(alpha) - std::log(series.normalizer())) {}

    double at_index(std::size_t i) const { return from_level(alpha_ * series_.weight(i)); }

    double at(double t) const { return from_level(alpha_ * series_.unnormalized(t) / series_.normalizer()); }

    double derivative(double t) const {
        const double x = alpha_ * series_.unnormalized(t) / series_.normalizer();
        if (x <= 0.0) return 0.0;
        const double z = normal_quantile(x);
        return pi_ * std::exp(-mu_ * z - 0.5 * mu_ * mu_) * alpha_ *
               series_.unnormalized_derivative(t) / series_.normalizer();
    }

    // log of g(e^s) e^s, the integrand after substituting t = e^s.
    double log_integrand(double s) const {
        const double log_x = log_scale_ + series_.log_unnormalized_at(s);
        const double z = normal_quantile_log(std::min(log_x, 0.0));
        return s + std::log(pi_) + log_normal_cdf(z + mu_);
    }

private:
    double from_level(double x) const {
        if (x <= 0.0) return 0.0;
        return pi_ * normal_cdf(normal_quantile(x) + mu_);
    }

    double alpha_;
    const WeightSeries& series_;
    double pi_;
    double mu_;
    double log_scale_;
};

struct TailIntegral {
    double value = 0.0;
    double error = 0.0;
};

// Integral of exp(f(s)) over [s_lo, s_hi] (s_hi may be +inf). The integrand
// is rescaled by its running maximum so values far beyond the double range of
// t are handled; `decay` lower-bounds -f'(s) far out and bounds the part of an
// infinite range that is cut off.
TailIntegral integrate_log_domain(const std::function<double(double)>& f, double s_lo, double s_hi,
                                  double decay) {
    std::vector<double> grid{s_lo};
    std::vector<double> values{f(s_lo)};
    double fmax = values.front();
    const bool infinite = std::isinf(s_hi);
    for (std::size_t iter = 0;; ++iter) {
        if (iter > 4'000'000) throw InvalidParameter("tail integral did not decay");
        const double s = grid.back();
        if (!infinite && s >= s_hi) break;
        if (infinite && values.back() < fmax - 60.0 && values.back() < values[values.size() - 2])
            break;
        double next = s + std::max(0.25, 0.01 * std::abs(s));
        if (!infinite) next = std::min(next, s_hi);
        grid.push_back(next);
        values.push_back(f(next));
        fmax = std::max(fmax, values.back());
    }
    if (!std::isfinite(fmax)) return {0.0, 0.0};

    CompensatedSum scaled;
    double scaled_err = 0.0;
    auto integrand = [&](double s) { return std::exp(f(s) - fmax); };
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double err = 0.0;
        const double piece = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            integrand, grid[k], grid[k + 1], 4, 1e-13, &err);
        scaled.add(piece);
        scaled_err += err;
    }
    if (infinite) scaled_err += 2.0 * std::exp(values.back() - fmax) / decay;
    const double scale = std::exp(fmax);
    if (!std::isfinite(scale)) throw InvalidParameter("expected discoveries overflow a double");
    return {scale * scaled.value(), scale * scaled_err + 4e-16 * scale * scaled.value()};
}

// Euler-Maclaurin estimate of sum_{i=M}^{N} g(i) (N may be infinite):
// integral + end halves - first-derivative correction; the next term bounds
// the remainder.
struct TailEstimate {
    double value = 0.0;
    double quadrature_error = 0.0;
    double remainder_error = 0.0;
};

TailEstimate em_tail(const DiscoveryTerm& term, std::size_t M, std::size_t N, double decay) {
    const double m = static_cast<double>(M);
    const bool infinite = N == kInfiniteHorizon;
    const double s_hi = infinite ? INFINITY : std::log(static_cast<double>(N));
    auto f = [&](double s) { return term.log_integrand(s); };
    const auto integral = integrate_log_domain(f, std::log(m), s_hi, decay);

    auto third = [&](double t) {
        const double h = 0.25 * t;
        return (term.derivative(t + h) - 2.0 * term.derivative(t) + term.derivative(t - h)) / (h * h);
    };
    double value = integral.value + 0.5 * term.at(m) - term.derivative(m) / 12.0;
    double remainder = std::abs(third(m));
    if (!infinite) {
        const double n = static_cast<double>(N);
        value += 0.5 * term.at(n) + term.derivative(n) / 12.0;
        remainder += std::abs(third(n));
    }
    // 4x safety on the finite-difference estimate of g'''.
    return {value, integral.error, 4.0 * remainder / 720.0};
}

double target_for(double value) { return std::max(kAbsTarget, kRelTarget * std::abs(value)); }

}  // namespace

void GaussianMixModel::validate() const {
    if (!(pi_A > 0.0 && pi_A < 1.0)) throw InvalidParameter("pi_A must lie in (0,1)");
    if (!(mu_A > 0.0) || !std::isfinite(mu_A)) throw InvalidParameter("mu_A must be positive");
    if (!(mu_N <= 0.0) || !std::isfinite(mu_N)) throw InvalidParameter("mu_N must be <= 0");
}

DiscoveryEstimate expected_true_discoveries_bounded(std::size_t N, double alpha,
                                                    const WeightSeries& series, double pi_A,
                                                    double mu_A) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    if (!(pi_A >= 0.0 && pi_A <= 1.0)) throw InvalidParameter("pi_A must lie in [0,1]");
    if (!std::isfinite(mu_A)) throw InvalidParameter("mu_A must be finite");
    if (N == 0) return {0.0, 0.0};
    if (pi_A == 0.0) return {0.0, 0.0};

    const DiscoveryTerm term(alpha, series, pi_A, mu_A);
    if (series.kind() == SeriesKind::explicit_list) N = std::min(N, series.support_size());

    if (N <= kDirectLimit || series.kind() == SeriesKind::explicit_list) {
        CompensatedSum sum;
        for (std::size_t i = 1; i <= N; ++i) sum.add(term.at_index(i));
        return {sum.value(), 0.0};
    }

    if (N == kInfiniteHorizon && series.kind() == SeriesKind::log_q_series) {
        // Phi(Phi^{-1}(x) + mu) / x grows like exp(mu sqrt(2 log(1/x))), which
        // the log-q tail cannot absorb.
        if (mu_A > 0.0)
            throw InvalidParameter("expected discoveries diverge for the log-q series as N -> infinity");
        if (mu_A == 0.0) return {pi_A * alpha, pi_A * alpha * series.normalizer_bracket().width()};
        throw InvalidParameter("infinite horizon with mu_A < 0 is only supported for the q-series");
    }

    const double decay = series.kind() == SeriesKind::q_series ? series.exponent() - 1.0 : 1.0;
    CompensatedSum head;
    std::size_t m = 1;
    DiscoveryEstimate best{};
    for (std::size_t M = kTailStart;; M *= 4) {
        const std::size_t stop = std::min(M, N);
        for (; m < stop; ++m) head.add(term.at_index(m));
        const auto tail = em_tail(term, M, N, decay);
        best = {head.value() + tail.value, tail.quadrature_error + tail.remainder_error};
        // Only the remainder shrinks with M.
        if (tail.remainder_error <= 0.25 * target_for(best.value) || M >= kTailStartMax || 4 * M >= N)
            break;
    }
    return best;
}

double expected_true_discoveries(std::size_t N, double alpha, const WeightSeries& series,
                                 double pi_A, double mu_A) {
    return expected_true_discoveries_bounded(N, alpha, series, pi_A, mu_A).value;
}

double expected_discoveries_dq(std::size_t N, double mu_A, double alpha, double q) {
    if (N == 0 || N == kInfiniteHorizon) throw InvalidParameter("N must be a positive finite integer");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    const auto series = WeightSeries::q_series(q);
    const double Z = series.normalizer();

    // sum_j log(j) j^{-q}, with an Euler-Maclaurin tail.
    constexpr std::size_t M = std::size_t{1} << 16;
    CompensatedSum log_moment;
    for (std::size_t j = 2; j < M; ++j) {
        const double t = static_cast<double>(j);
        log_moment.add(std::log(t) * std::pow(t, -q));
    }
    const double m = static_cast<double>(M);
    const double lm = std::log(m);
    const double f_m = lm * std::pow(m, -q);
    const double df_m = std::pow(m, -q - 1.0) * (1.0 - q * lm);
    const double integral = std::pow(m, 1.0 - q) * (lm / (q - 1.0) + 1.0 / ((q - 1.0) * (q - 1.0)));
    const double dlogz = (log_moment.value() + integral + 0.5 * f_m - df_m / 12.0) / Z;

    CompensatedSum total;
    for (std::size_t i = 1; i <= N; ++i) {
        const double gamma = series.weight(i);
        const double x = alpha * gamma;
        if (x <= 0.0) continue;
        const double z = normal_quantile(x);
        const double dgamma = gamma * (dlogz - std::log(static_cast<double>(i)));
        total.add(std::exp(-mu_A * z - 0.5 * mu_A * mu_A) * alpha * dgamma);
    }
    return total.value();
}

OptimalQ optimal_q(std::size_t N, double mu_A, double alpha, double q_max, double tol) {
    if (N < 2 || N == kInfiniteHorizon)
        throw InvalidParameter("optimal q needs a finite horizon N >= 2");
    if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidParameter("optimal q needs alpha in (0, 1/2)");
    if (!(q_max > 1.0)) throw InvalidParameter("q_max must exceed 1");
    if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");

    auto value = [&](double q) {
        return expected_true_discoveries(N, alpha, WeightSeries::q_series(q), 1.0, mu_A);
    };
    const double lower = 1.0 + 1e-6;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

    for (;;) {
        double a = lower;
        double b = q_max;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = value(c);
        double fd = value(d);
        while (b - a > tol) {
            if (fc >= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = value(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = value(d);
            }
        }
        const double q = 0.5 * (a + b);
        if (q_max - q > 10.0 * tol || q_max >= 1e4) return {q, value(q), q_max};
        q_max *= 2.0;
    }
}

double cstar_objective(double x, const GaussianMixModel& m) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    if (x <= 0.5) {
        const double z = normal_quantile(x);
        return x - ((1.0 - m.pi_A) * normal_cdf(z + m.mu_N) + m.pi_A * normal_cdf(z + m.mu_A));
    }
    const double y = 1.0 - x;
    const double z = -normal_quantile(y);
    return (1.0 - m.pi_A) * normal_sf(z + m.mu_N) + m.pi_A * normal_sf(z + m.mu_A) - y;
}

double cstar_threshold(const GaussianMixModel& model) {
    model.validate();
    constexpr double kEdge = 1e-9;
    auto J = [&](double x) { return cstar_objective(x, model); };

    // Coarse scan on a normal-quantile grid, dense near both ends of (0,1).
    double lo = -1.0;
    double hi = -1.0;
    bool seen_negative = false;
    double last_negative = 0.0;
    for (double z = -12.0; z <= 6.5; z += 1e-3) {
        const double x = normal_cdf(z);
        const double j = J(x);
        if (j < 0.0) {
            seen_negative = true;
            last_negative = x;
        } else if (j > 0.0 && seen_negative) {
            lo = last_negative;
            hi = x;
            break;
        }
    }
    if (lo < 0.0) return 1.0;

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (J(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double root = std::abs(J(lo)) <= std::abs(J(hi)) ? lo : hi;
    return root > 1.0 - kEdge ? 1.0 : root;
}

OptimalGamma optimal_gamma_varying(std::span<const double> pi, std::span<const double> mu,
                                   double alpha, std::size_t horizon) {
    if (horizon == 0) throw InvalidParameter("horizon must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    auto fits = [&](std::span<const double> v) { return v.size() == 1 || v.size() == horizon; };
    if (!fits(pi) || !fits(mu))
        throw InvalidParameter("pi and mu need one entry or one per index up to the horizon");
    for (double p : pi)
        if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("pi_i must lie in (0,1)");
    for (double m : mu)
        if (!(m > 0.0) || !std::isfinite(m)) throw InvalidParameter("mu_i must be positive");

    auto pi_at = [&](std::size_t i) { return pi.size() == 1 ? pi[0] : pi[i]; };
    auto mu_at = [&](std::size_t i) { return mu.size() == 1 ? mu[0] : mu[i]; };
    auto fill = [&](double log_eta, std::vector<double>& out) {
        CompensatedSum sum;
        for (std::size_t i = 0; i < horizon; ++i) {
            const double m = mu_at(i);
            const double h = (log_eta - std::log(pi_at(i))) / m + 0.5 * m;
            out[i] = normal_sf(h) / alpha;
            sum.add(out[i]);
        }
        return sum.value();
    };

    const bool constant = std::all_of(pi.begin(), pi.end(), [&](double p) { return p == pi[0]; }) &&
                          std::all_of(mu.begin(), mu.end(), [&](double m) { return m == mu[0]; });
    if (constant) {
        // Every index has the same h, so the weights are exactly uniform.
        const double h = -normal_quantile(alpha / static_cast<double>(horizon));
        return {std::vector<double>(horizon, 1.0 / static_cast<double>(horizon)),
                std::exp((h - 0.5 * mu[0]) * mu[0] + std::log(pi[0]))};
    }

    std::vector<double> w(horizon);
    // Sum is decreasing in eta.
    double lo = -50.0;
    double hi = 50.0;
    while (fill(lo, w) < 1.0) {
        lo *= 2.0;
        if (lo < -1e5) throw Infeasible("no multiplier makes the weights sum to one");
    }
    while (fill(hi, w) > 1.0) {
        hi *= 2.0;
        if (hi > 1e5) throw Infeasible("no multiplier makes the weights sum to one");
    }
    double log_eta = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        log_eta = 0.5 * (lo + hi);
        const double s = fill(log_eta, w);
        if (std::abs(s - 1.0) <= 1e-14) break;
        if (s > 1.0)
            lo = log_eta;
        else
            hi = log_eta;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(log_eta))) break;
    }
    const double s = fill(log_eta, w);
    if (!(std::abs(s - 1.0) <= 1e-9)) throw Infeasible("multiplier bisection did not balance the sum");
    for (double& g : w) g /= s;
    return {std::move(w), std::exp(log_eta)};
}

}  // namespace ofwer
