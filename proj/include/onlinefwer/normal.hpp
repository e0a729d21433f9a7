#pragma once

// Standard normal distribution helpers.
//
// Allocation levels in the online procedures can be as small as 1e-300, so the
// quantile has to stay accurate deep into the lower tail, and a log-domain
// quantile is provided for probabilities that underflow a double entirely.

namespace ofwer {

double normal_pdf(double x);

// Phi(x). Relative error grows like x^2 * eps in the lower tail (about 3e-13 at x = -37).
double normal_cdf(double x);

// 1 - Phi(x) without cancellation.
double normal_sf(double x);

// log Phi(x); uses the asymptotic expansion below x = -37 where Phi underflows.
double log_normal_cdf(double x);

// Phi^{-1}(p). Returns -inf at 0 and +inf at 1; throws InvalidParameter outside [0,1].
double normal_quantile(double p);

// Phi^{-1}(exp(log_p)) for log_p <= 0, valid far below the double range of p.
double normal_quantile_log(double log_p);

// 1 - (1 - alpha)^exponent evaluated as -expm1(exponent * log1p(-alpha)).
double sidak_level(double alpha, double exponent);

}  // namespace ofwer
