#include "onlinefwer/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "onlinefwer/errors.hpp"

namespace ofwer {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Rational initial guess (Acklam), refined below with Halley steps.
double quantile_initial(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Lower-half quantile, p in (0, 0.5].
double lower_quantile(double p) {
    double x = quantile_initial(p);
    for (int iter = 0; iter < 3; ++iter) {
        const double e = normal_cdf(x) - p;
        const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
        const double next = x - u / (1.0 + 0.5 * x * u);
        if (!std::isfinite(next)) break;
        if (next == x) break;
        x = next;
    }
    return x;
}

}  // namespace

// x*x is split into its rounded value and the exact rounding error, which
// keeps the relative error small in the tails.
double normal_pdf(double x) {
    const double x2 = x * x;
    const double err = std::fma(x, x, -x2);
    return std::exp(-0.5 * x2 - kLogSqrt2Pi) * (1.0 - 0.5 * err);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_normal_cdf(double x) {
    if (x > 0.0) return std::log1p(-normal_sf(x));
    if (x > -37.0) return std::log(normal_cdf(x));
    // Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - ...)
    const double r = 1.0 / (x * x);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double normal_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("normal_quantile: p outside [0,1]");
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (p < std::numeric_limits<double>::min()) return normal_quantile_log(std::log(p));
    if (p <= 0.5) return lower_quantile(p);
    // 1 - p is exact for p >= 0.5.
    return -lower_quantile(1.0 - p);
}

double normal_quantile_log(double log_p) {
    if (std::isnan(log_p) || log_p > 0.0)
        throw InvalidParameter("normal_quantile_log: log probability must be <= 0");
    if (log_p == -std::numeric_limits<double>::infinity())
        return -std::numeric_limits<double>::infinity();
    if (log_p > -700.0) return normal_quantile(std::exp(log_p));

    // Newton on log Phi(x) = log_p, started from the leading asymptotic term.
    const double s = -2.0 * log_p;
    double x = -std::sqrt(s - std::log(s) - 2.0 * kLogSqrt2Pi);
    for (int iter = 0; iter < 50; ++iter) {
        const double f = log_normal_cdf(x) - log_p;
        const double slope = std::exp(-0.5 * x * x - kLogSqrt2Pi - log_normal_cdf(x));
        const double next = x - f / slope;
        if (std::abs(next - x) <= 1e-15 * std::abs(x)) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

double sidak_level(double alpha, double exponent) {
    return -std::expm1(exponent * std::log1p(-alpha));
}

}  // namespace ofwer
