#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "onlinefwer/audit.hpp"
#include "onlinefwer/errors.hpp"
#include "onlinefwer/scheduler.hpp"
#include "support.hpp"

using namespace ofwer;
using testsupport::config;
using testsupport::fuzz_length;
using testsupport::fuzz_stream;
using testsupport::q_series;

namespace {

const double kGamma1 = 6.0 / (std::numbers::pi * std::numbers::pi);

ProcedureConfig with(ProcedureKind kind, std::optional<double> lambda, std::optional<double> tau) {
    auto c = config(kind);
    if (lambda) c.lambda = Schedule::constant(*lambda);
    if (tau) c.tau = Schedule::constant(*tau);
    return c;
}

void check_levels_equal(const std::vector<Decision>& a, const std::vector<Decision>& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].level == b[i].level);
        CHECK(a[i].rejected == b[i].rejected);
    }
}

}  // namespace

TEST_CASE("degenerate thresholds reduce every variant exactly") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto p = fuzz_stream(seed, fuzz_length(seed));
        const auto sidak = run_procedure(config(ProcedureKind::online_sidak), p);
        check_levels_equal(run_procedure(with(ProcedureKind::discard_sidak, std::nullopt, 1.0), p), sidak);
        check_levels_equal(run_procedure(with(ProcedureKind::adaptive_sidak, 0.0, std::nullopt), p), sidak);
        check_levels_equal(run_procedure(with(ProcedureKind::addis_sidak, 0.0, 1.0), p), sidak);

        const auto fallback = run_procedure(config(ProcedureKind::online_fallback), p);
        check_levels_equal(run_procedure(with(ProcedureKind::discard_fallback, std::nullopt, 1.0), p), fallback);
    }
}

TEST_CASE("discard-sidak first level") {
    auto c = with(ProcedureKind::discard_sidak, std::nullopt, 0.5);
    c.series = q_series(2.0);
    const auto d = run_procedure(c, std::vector<double>{0.9})[0];
    CHECK(d.level == doctest::Approx(0.5 * (1.0 - std::pow(0.8, kGamma1))).epsilon(1e-14));
    CHECK(d.level == doctest::Approx(0.063434).epsilon(1e-5));
}

TEST_CASE("adaptive-sidak first exponent") {
    auto c = with(ProcedureKind::adaptive_sidak, 0.5, std::nullopt);
    c.series = q_series(2.0);
    const auto d = run_procedure(c, std::vector<double>{0.9})[0];
    CHECK(d.beta == doctest::Approx(0.5 * kGamma1).epsilon(1e-15));
    CHECK(d.level == doctest::Approx(1.0 - std::pow(0.8, 0.5 * kGamma1)).epsilon(1e-14));
}

TEST_CASE("addis-sidak first level") {
    auto c = with(ProcedureKind::addis_sidak, 0.25, 0.5);
    c.series = q_series(2.0);
    const auto d = run_procedure(c, std::vector<double>{0.9})[0];
    CHECK(d.beta == doctest::Approx(0.5 * kGamma1).epsilon(1e-15));
    CHECK(d.level == doctest::Approx(0.5 * (1.0 - std::pow(0.8, 0.5 * kGamma1))).epsilon(1e-14));
}

TEST_CASE("tau below alpha is rejected where required") {
    CHECK_THROWS_AS(make_scheduler(with(ProcedureKind::discard_sidak, std::nullopt, 0.1)), InvalidParameter);
    CHECK_THROWS_AS(make_scheduler(with(ProcedureKind::addis_sidak, 0.05, 0.1)), InvalidParameter);
    CHECK_THROWS_AS(make_scheduler(with(ProcedureKind::addis_sidak, 0.6, 0.5)), InvalidParameter);
    CHECK_THROWS_AS(make_scheduler(with(ProcedureKind::discard_fallback, std::nullopt, 0.1)), InvalidParameter);
    CHECK_NOTHROW(make_scheduler(with(ProcedureKind::discard_spending, std::nullopt, 0.1)));
}

TEST_CASE("discard-fallback without rejections equals discard-spending") {
    auto df = with(ProcedureKind::discard_fallback, std::nullopt, 0.5);
    auto ds = with(ProcedureKind::discard_spending, std::nullopt, 0.5);
    const auto p = fuzz_stream(2, 200);
    std::vector<double> no_rej;
    for (double x : p) no_rej.push_back(std::max(x, 0.1));
    const auto a = run_procedure(df, no_rej);
    const auto b = run_procedure(ds, no_rej);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE_FALSE(a[i].rejected);
        CHECK(a[i].level == doctest::Approx(b[i].level).epsilon(1e-15));
    }
}

TEST_CASE("discard-fallback passes a rejection to the next selected hypothesis") {
    auto c = with(ProcedureKind::discard_fallback, std::nullopt, 0.5);
    c.fallback_weights = FallbackWeights::one_step();
    const auto w = c.series.build();
    // 0.9 is discarded, 0.0 is rejected, 0.8 discarded, 0.3 selected.
    const auto t = run_procedure(c, std::vector<double>{0.9, 0.0, 0.8, 0.3, 0.3});
    CHECK_FALSE(t[0].selected);
    CHECK(t[1].rejected);
    CHECK(t[1].level == 0.5 * (0.2 * w.weight(1)));
    CHECK(t[2].level == doctest::Approx(0.5 * (0.2 * w.weight(2) + t[1].level)).epsilon(1e-15));
    CHECK(t[3].level == doctest::Approx(0.5 * (0.2 * w.weight(2) + t[1].level)).epsilon(1e-15));
    CHECK(t[4].level == doctest::Approx(0.5 * 0.2 * w.weight(3)).epsilon(1e-15));
}

TEST_CASE("sidak-type levels dominate spending-type levels with the same budget") {
    for (double x = 0.0; x <= 1.0; x += 1.0 / 1024) CHECK(1.0 - std::pow(0.8, x) >= 0.2 * x - 1e-16);
    const auto p = fuzz_stream(9, 300);
    const auto sidak = run_procedure(with(ProcedureKind::addis_sidak, 0.25, 0.5), p);
    for (const auto& d : sidak) CHECK(d.level >= 0.2 * d.tau * d.beta * (1.0 - 1e-15));
}

TEST_CASE("variant traces pass their audits") {
    for (auto kind : {ProcedureKind::discard_sidak, ProcedureKind::adaptive_sidak, ProcedureKind::addis_sidak,
                      ProcedureKind::discard_fallback}) {
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            const auto c = config(kind);
            const auto r = audit_trace(run_procedure(c, fuzz_stream(seed, 300)), c);
            CHECK(r.passed);
            CHECK(r.max_usage <= 1.0 + 1e-12);
        }
    }
}
