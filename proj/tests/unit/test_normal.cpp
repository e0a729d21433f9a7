#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>

#include "onlinefwer/errors.hpp"
#include "onlinefwer/normal.hpp"

using namespace ofwer;

namespace {
const boost::math::normal_distribution<double> ref;

double rel(double a, double b) { return std::fabs(a - b) / std::fmax(std::fabs(b), 1e-300); }
}  // namespace

TEST_CASE("cdf and sf agree with boost across the range") {
    for (double x = -37.0; x <= 8.0; x += 0.0137) {
        const double c = boost::math::cdf(ref, x);
        CHECK(std::fabs(normal_cdf(x) - c) <= 1e-12);
        // Both sides carry argument rounding of order x^2 * eps.
        const double tol = 4e-15 * std::fmax(1.0, x * x);
        CHECK(rel(normal_cdf(x), c) <= tol);
        CHECK(rel(normal_sf(-x), c) <= tol);
        CHECK(rel(normal_pdf(x), boost::math::pdf(ref, x)) <= tol);
    }
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-16));
}

TEST_CASE("quantile agrees with boost down to 1e-300") {
    for (int e = -300; e <= -1; e += 7) {
        for (double m : {1.0, 2.5, 7.3}) {
            const double p = m * std::pow(10.0, e);
            const double z = boost::math::quantile(ref, p);
            CHECK(std::fabs(normal_quantile(p) - z) <= 1e-10 * std::fmax(1.0, std::fabs(z)));
        }
    }
    for (double p = 0.001; p < 1.0; p += 0.0173)
        CHECK(std::fabs(normal_quantile(p) - boost::math::quantile(ref, p)) <= 1e-10);
    const double hi = 1.0 - 1e-16;
    CHECK(std::fabs(normal_quantile(hi) - boost::math::quantile(ref, hi)) <= 1e-9);
}

TEST_CASE("quantile endpoints and domain") {
    CHECK(normal_quantile(0.0) == -std::numeric_limits<double>::infinity());
    CHECK(normal_quantile(1.0) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(normal_quantile(-0.1), InvalidParameter);
    CHECK_THROWS_AS(normal_quantile(1.1), InvalidParameter);
    CHECK_THROWS_AS(normal_quantile(std::nan("")), InvalidParameter);
}

TEST_CASE("log-domain quantile matches the direct one and extends past underflow") {
    for (double p : {1e-5, 1e-50, 1e-200, 1e-300})
        CHECK(rel(normal_quantile_log(std::log(p)), normal_quantile(p)) <= 1e-10);
    // Phi(z) for z = -50 is about 2e-545: round trip through log Phi.
    for (double z : {-40.0, -50.0, -120.0}) CHECK(rel(normal_quantile_log(log_normal_cdf(z)), z) <= 1e-10);
}

TEST_CASE("log cdf is continuous across the asymptotic switch") {
    const double a = log_normal_cdf(-37.0 + 1e-9);
    const double b = log_normal_cdf(-37.0 - 1e-9);
    CHECK(std::fabs(a - b) < 1e-6);
    CHECK(rel(log_normal_cdf(-30.0), std::log(boost::math::cdf(ref, -30.0))) <= 1e-13);
}

TEST_CASE("sidak level is stable for tiny exponents") {
    CHECK(rel(sidak_level(0.2, 0.5), 1.0 - std::pow(0.8, 0.5)) <= 1e-15);
    CHECK(sidak_level(0.2, 1.0) == doctest::Approx(0.2).epsilon(1e-16));
    const double tiny = 1e-14;
    CHECK(sidak_level(0.2, tiny) > 0.0);
    CHECK(rel(sidak_level(0.2, tiny), -tiny * std::log(0.8)) <= 1e-10);
}
