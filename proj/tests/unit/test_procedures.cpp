#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "onlinefwer/audit.hpp"
#include "onlinefwer/errors.hpp"
#include "onlinefwer/normal.hpp"
#include "onlinefwer/scheduler.hpp"
#include "support.hpp"

using namespace ofwer;
using testsupport::config;
using testsupport::fuzz_length;
using testsupport::fuzz_stream;
using testsupport::q_series;

namespace {
const double kGamma1 = 6.0 / (std::numbers::pi * std::numbers::pi);

ProcedureConfig spending_q2() {
    auto c = config(ProcedureKind::alpha_spending);
    c.series = q_series(2.0);
    return c;
}
}  // namespace

TEST_CASE("alpha-spending first level with the q=2 series") {
    auto s = make_scheduler(spending_q2());
    const auto d = s->step(0.05);
    CHECK(d.level == doctest::Approx(0.2 * kGamma1).epsilon(1e-14));
    CHECK(d.level == doctest::Approx(0.121585).epsilon(1e-6));
    CHECK(d.rejected);
    CHECK(d.selected);
    CHECK_FALSE(d.candidate);
}

TEST_CASE("alpha-spending levels are alpha * gamma_i") {
    auto c = spending_q2();
    const auto series = c.series.build();
    const auto trace = run_procedure(c, fuzz_stream(3, 50));
    for (const auto& d : trace) CHECK(d.level == 0.2 * series.weight(d.index));
}

TEST_CASE("p = 1 is never rejected") {
    for (auto kind : kAllProcedureKinds) {
        auto s = make_scheduler(config(kind));
        for (int i = 0; i < 20; ++i) CHECK_FALSE(s->step(1.0).rejected);
    }
}

TEST_CASE("single-weight explicit series") {
    auto c = config(ProcedureKind::alpha_spending);
    c.series = {SeriesKind::explicit_list, 0.0, {1.0}};
    CHECK(run_procedure(c, std::vector<double>{0.3})[0].level == 0.2);
    c.kind = ProcedureKind::online_sidak;
    CHECK(run_procedure(c, std::vector<double>{0.3})[0].level == 0.2);
}

TEST_CASE("p outside [0,1] is an input error") {
    auto s = make_scheduler(config(ProcedureKind::alpha_spending));
    CHECK_THROWS_AS(s->step(-0.01), InvalidInput);
    CHECK_THROWS_AS(s->step(1.5), InvalidInput);
    CHECK_THROWS_AS(s->step(std::nan("")), InvalidInput);
    CHECK(s->steps() == 0);
}

TEST_CASE("online sidak first level") {
    auto c = spending_q2();
    c.kind = ProcedureKind::online_sidak;
    const auto d = run_procedure(c, std::vector<double>{0.5})[0];
    CHECK(d.level == doctest::Approx(1.0 - std::pow(0.8, kGamma1)).epsilon(1e-14));
    CHECK(d.level == doctest::Approx(0.12687).epsilon(1e-4));
}

TEST_CASE("online sidak dominates alpha-spending and keeps the product bound") {
    for (const auto& series : {q_series(2.0), SeriesSpec{}, q_series(1.1)}) {
        auto c = config(ProcedureKind::online_sidak);
        c.series = series;
        auto a = config(ProcedureKind::alpha_spending);
        a.series = series;
        const auto p = fuzz_stream(11, 500);
        const auto sidak = run_procedure(c, p);
        const auto spend = run_procedure(a, p);
        const auto w = series.build();
        double log_prod = 0.0;
        double gamma_sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(sidak[i].level > spend[i].level);
            log_prod += std::log1p(-sidak[i].level);
            gamma_sum += w.weight(i + 1);
            CHECK(std::exp(log_prod) == doctest::Approx(std::pow(0.8, gamma_sum)).epsilon(1e-12));
            CHECK(std::exp(log_prod) >= 0.8 * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("fallback-1 follows the one-step recursion") {
    auto c = config(ProcedureKind::online_fallback);
    c.fallback_weights = FallbackWeights::one_step();
    const auto w = c.series.build();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = fuzz_stream(seed, fuzz_length(seed));
        const auto t = run_procedure(c, p);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double carried = (i > 0 && t[i - 1].rejected) ? t[i - 1].level : 0.0;
            CHECK(t[i].level == 0.2 * w.weight(i + 1) + carried);
        }
    }
}

TEST_CASE("fallback with R_1 = 1 and one-step weights") {
    auto c = spending_q2();
    c.kind = ProcedureKind::online_fallback;
    c.fallback_weights = FallbackWeights::one_step();
    const auto w = c.series.build();
    const auto t = run_procedure(c, std::vector<double>{0.001, 0.9, 0.9});
    CHECK(t[0].rejected);
    CHECK(t[1].level == 0.2 * w.weight(2) + t[0].level);
    CHECK(t[2].level == 0.2 * w.weight(3));
}

TEST_CASE("fallback with lagged-gamma weights") {
    auto c = spending_q2();
    c.kind = ProcedureKind::online_fallback;
    const auto w = c.series.build();
    const auto t = run_procedure(c, std::vector<double>{0.001, 0.9, 0.9});
    CHECK(t[1].level == doctest::Approx(0.2 * w.weight(2) + w.weight(1) * t[0].level).epsilon(1e-15));
    CHECK(t[2].level == doctest::Approx(0.2 * w.weight(3) + w.weight(2) * t[0].level).epsilon(1e-15));
}

TEST_CASE("fallback without rejections equals alpha-spending") {
    auto c = config(ProcedureKind::online_fallback);
    const auto a = run_procedure(config(ProcedureKind::alpha_spending), std::vector<double>(40, 0.95));
    const auto f = run_procedure(c, std::vector<double>(40, 0.95));
    CHECK(testsupport::levels(a) == testsupport::levels(f));
}

TEST_CASE("fallback levels dominate alpha-spending on the same stream") {
    for (auto weights : {FallbackWeights::lagged_gamma(), FallbackWeights::one_step()}) {
        auto c = config(ProcedureKind::online_fallback);
        c.fallback_weights = weights;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto p = fuzz_stream(seed, 80);
            const auto f = run_procedure(c, p);
            const auto a = run_procedure(config(ProcedureKind::alpha_spending), p);
            for (std::size_t i = 0; i < p.size(); ++i) CHECK(f[i].level >= a[i].level);
        }
    }
}

TEST_CASE("removing a fallback rejection never raises later levels") {
    auto c = config(ProcedureKind::online_fallback);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto p = fuzz_stream(seed, 60);
        const auto base = run_procedure(c, p);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!base[k].rejected) continue;
            auto q = p;
            q[k] = 1.0;
            const auto alt = run_procedure(c, q);
            // Later rejections may change too, so compare only until the next one.
            for (std::size_t i = k + 1; i < p.size(); ++i) {
                CHECK(alt[i].level <= base[i].level);
                if (base[i].rejected || alt[i].rejected) break;
            }
            break;
        }
    }
}

TEST_CASE("explicit fallback weights are validated") {
    CHECK_THROWS_AS(FallbackWeights::explicit_matrix({{0.0, 0.7, 0.7}}), InvalidParameter);
    CHECK_THROWS_AS(FallbackWeights::explicit_matrix({{0.5, 0.5}}), InvalidParameter);  // w_{1,1} != 0
    CHECK_THROWS_AS(FallbackWeights::explicit_matrix({{0.0, -0.1}}), InvalidParameter);
    auto c = config(ProcedureKind::online_fallback);
    c.fallback_weights = FallbackWeights::explicit_matrix({{0.0, 0.0, 1.0}});
    const auto w = c.series.build();
    const auto t = run_procedure(c, std::vector<double>{0.0, 0.9, 0.9, 0.9});
    CHECK(t[1].level == 0.2 * w.weight(2));
    CHECK(t[2].level == 0.2 * w.weight(3) + t[0].level);
    CHECK(t[3].level == 0.2 * w.weight(4));
}

TEST_CASE("traces pass their own audit") {
    for (auto kind : {ProcedureKind::alpha_spending, ProcedureKind::online_sidak, ProcedureKind::online_fallback}) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto t = run_procedure(config(kind), fuzz_stream(seed, 200));
            CHECK(audit_trace(t, kind, 0.2).passed);
        }
    }
}

TEST_CASE("decisions are indexed from 1 and levels stay below 1") {
    auto s = make_scheduler(config(ProcedureKind::online_fallback));
    for (std::size_t i = 1; i <= 30; ++i) {
        const auto d = s->step(0.0);
        CHECK(d.index == i);
        CHECK(d.level < 1.0);
        CHECK(d.rejected);
    }
    CHECK(s->trace().size() == 30);
}
