#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
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

ProcedureConfig addis(double lambda, double tau) {
    auto c = config(ProcedureKind::addis_spending);
    c.lambda = Schedule::constant(lambda);
    c.tau = Schedule::constant(tau);
    return c;
}

// Same levels and flags; threshold metadata may legitimately differ.
void check_same(const std::vector<Decision>& a, const std::vector<Decision>& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].level == b[i].level);
        CHECK(a[i].rejected == b[i].rejected);
        CHECK(a[i].selected == b[i].selected);
        CHECK(a[i].candidate == b[i].candidate);
    }
}

}  // namespace

TEST_CASE("discarded p-values keep the weight index") {
    auto c = config(ProcedureKind::discard_spending);
    c.series = q_series(2.0);
    c.tau = Schedule::constant(0.5);
    const auto t = run_procedure(c, std::vector<double>{0.7, 0.3});
    CHECK_FALSE(t[0].selected);
    CHECK_FALSE(t[0].rejected);
    CHECK(t[1].level == 0.2 * 0.5 * kGamma1);
    CHECK(t[1].level == t[0].level);
}

TEST_CASE("discard with tau = 1 is alpha-spending") {
    auto c = config(ProcedureKind::discard_spending);
    c.tau = Schedule::constant(1.0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = fuzz_stream(seed, fuzz_length(seed));
        CHECK(run_procedure(c, p) == run_procedure(config(ProcedureKind::alpha_spending), p));
    }
}

TEST_CASE("adaptive candidates do not advance the weight index") {
    auto c = config(ProcedureKind::adaptive_spending);
    c.series = q_series(2.0);
    c.lambda = Schedule::constant(0.5);
    const auto t = run_procedure(c, std::vector<double>{0.4, 0.9});
    CHECK(t[0].candidate);
    CHECK(t[1].level == 0.2 * 0.5 * kGamma1);
    CHECK_FALSE(t[1].candidate);
}

TEST_CASE("adaptive with lambda = 0 is alpha-spending") {
    auto c = config(ProcedureKind::adaptive_spending);
    c.lambda = Schedule::constant(0.0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = fuzz_stream(seed, fuzz_length(seed));
        check_same(run_procedure(c, p), run_procedure(config(ProcedureKind::alpha_spending), p));
    }
}

TEST_CASE("ADDIS defaults and first level") {
    auto c = config(ProcedureKind::addis_spending);
    c.series = q_series(2.0);
    const auto d = run_procedure(c, std::vector<double>{0.6})[0];
    CHECK(d.tau == 0.5);
    CHECK(d.lambda == 0.25);
    CHECK(d.level == doctest::Approx(0.05 * kGamma1).epsilon(1e-14));
    CHECK(d.level == doctest::Approx(0.0303964).epsilon(1e-6));
    CHECK_FALSE(d.selected);
}

TEST_CASE("ADDIS reductions are exact on fuzzed streams") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto p = fuzz_stream(seed, fuzz_length(seed));
        check_same(run_procedure(addis(0.0, 1.0), p), run_procedure(config(ProcedureKind::alpha_spending), p));

        auto discard = config(ProcedureKind::discard_spending);
        discard.tau = Schedule::constant(0.5);
        check_same(run_procedure(addis(0.0, 0.5), p), run_procedure(discard, p));

        auto adaptive = config(ProcedureKind::adaptive_spending);
        adaptive.lambda = Schedule::constant(0.3);
        check_same(run_procedure(addis(0.3, 1.0), p), run_procedure(adaptive, p));

        auto local = addis(0.25, 0.5);
        local.kind = ProcedureKind::addis_local;
        local.lags = LagSchedule::constant(0);
        check_same(run_procedure(local, p), run_procedure(addis(0.25, 0.5), p));
    }
}

TEST_CASE("lambda must stay below tau") {
    CHECK_THROWS_AS(make_scheduler(addis(0.6, 0.5)), InvalidParameter);
    CHECK_THROWS_AS(make_scheduler(addis(0.5, 0.5)), InvalidParameter);
    auto c = addis(0.25, 0.5);
    c.tau = Schedule::sequence({0.5, 0.2});
    CHECK_THROWS_AS(make_scheduler(c), InvalidParameter);
}

TEST_CASE("callback thresholds are checked at the step") {
    auto c = config(ProcedureKind::addis_spending);
    c.lambda = Schedule::predictable([](std::size_t i, std::span<const Decision>) { return i < 3 ? 0.25 : 0.7; });
    auto s = make_scheduler(c);
    s->step(0.9);
    s->step(0.9);
    CHECK_THROWS_AS(s->step(0.9), InvalidParameter);
}

TEST_CASE("levels stay strictly below tau") {
    for (auto kind : kAllProcedureKinds) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto t = run_procedure(config(kind), fuzz_stream(seed, 120));
            for (const auto& d : t) CHECK(d.level < std::min(d.tau, 1.0));
        }
    }
}

TEST_CASE("local ADDIS at i = 1 uses gamma_1 for any lag") {
    for (std::size_t L : {0u, 1u, 5u}) {
        auto c = config(ProcedureKind::addis_local);
        c.lags = LagSchedule::constant(L);
        const auto w = c.series.build();
        const auto d = run_procedure(c, std::vector<double>{0.1})[0];
        CHECK(d.level == 0.2 * 0.25 * w.weight(1));
    }
}

TEST_CASE("local ADDIS with L = 2 counts hidden steps pessimistically") {
    auto c = config(ProcedureKind::addis_local);
    c.lags = LagSchedule::constant(2);
    const auto w = c.series.build();
    for (double p1 : {0.1, 0.3, 0.9}) {
        const std::vector<double> p{p1, 0.4, 0.05, 0.8, 0.2};
        const auto t = run_procedure(c, p);
        const int s1 = p1 <= 0.5;
        const int c1 = p1 <= 0.25;
        CHECK(t[3].level == 0.2 * 0.25 * w.weight(1 + 2 + s1 - c1));
        CHECK(t[1].level == 0.2 * 0.25 * w.weight(2));
        CHECK(t[2].level == 0.2 * 0.25 * w.weight(3));
    }
}

TEST_CASE("local ADDIS levels ignore p-values inside the lag window") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::vector<std::size_t> lags(60);
        for (std::size_t i = 0; i < lags.size(); ++i) lags[i] = (i + seed) % 4;
        for (std::size_t i = 1; i < lags.size(); ++i) lags[i] = std::min(lags[i], lags[i - 1] + 1);
        auto c = config(ProcedureKind::addis_local);
        c.lags = LagSchedule::list(lags);
        const auto p = fuzz_stream(seed, lags.size());
        const auto base = run_procedure(c, p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::size_t L = std::min(lags[i], i);
            for (std::size_t j = i - L; j < i; ++j) {
                auto q = p;
                q[j] = 1.0 - q[j];
                const auto alt = run_procedure(c, q);
                CHECK(alt[i].level == base[i].level);
                CHECK(alt[i].tau == base[i].tau);
                CHECK(alt[i].lambda == base[i].lambda);
            }
        }
    }
}

TEST_CASE("callbacks see only the permitted prefix") {
    std::vector<std::size_t> seen;
    auto c = config(ProcedureKind::addis_local);
    c.lags = LagSchedule::constant(2);
    c.tau = Schedule::predictable([&](std::size_t, std::span<const Decision> visible) {
        seen.push_back(visible.size());
        return 0.5;
    });
    run_procedure(c, fuzz_stream(1, 6));
    CHECK(seen == std::vector<std::size_t>{0, 0, 0, 1, 2, 3});
}

TEST_CASE("inadmissible lags are rejected") {
    CHECK(LagSchedule::first_inadmissible(std::vector<std::size_t>{0, 2, 0}) == 2u);
    CHECK_FALSE(LagSchedule::first_inadmissible(std::vector<std::size_t>{0, 1, 2, 0, 1}).has_value());
    auto c = config(ProcedureKind::addis_local);
    c.lags = LagSchedule::from_batch_ids();
    auto s = make_scheduler(c);
    s->step(0.1, 0);
    CHECK_THROWS_AS(s->step(0.1, 2), InvalidParameter);
    CHECK_THROWS_AS(make_scheduler(config(ProcedureKind::addis_spending))->step(0.1, 0), InvalidParameter);
}

TEST_CASE("batch ids become within-batch positions") {
    const std::vector<std::string> ids{"a", "a", "b", "b", "b", "c"};
    CHECK(LagSchedule::lags_from_batch_ids(ids) == std::vector<std::size_t>{0, 1, 0, 1, 2, 0});
    CHECK_THROWS_AS(LagSchedule::lags_from_batch_ids(std::vector<std::string>{"a", "b", "a"}), InvalidInput);
    BatchLagTracker tracker;
    CHECK(tracker.next("x") == 0);
    CHECK(tracker.next("x") == 1);
    CHECK(tracker.next("y") == 0);
    CHECK_THROWS_AS(tracker.next("x"), InvalidInput);
}

TEST_CASE("local ADDIS requires a nonincreasing series") {
    auto c = config(ProcedureKind::addis_local);
    c.series = {SeriesKind::explicit_list, 0.0, {0.1, 0.5}};
    CHECK_THROWS_AS(make_scheduler(c), InvalidParameter);
}

TEST_CASE("k-FWER wrapper") {
    const auto p = fuzz_stream(5, 200);
    const auto one = kfwer_wrap(config(ProcedureKind::addis_spending), 1);
    CHECK(run_procedure(one.config, p) == run_procedure(config(ProcedureKind::addis_spending), p));
    CHECK_FALSE(one.warning.has_value());

    const auto two = kfwer_wrap(config(ProcedureKind::alpha_spending), 2);
    const auto a = run_procedure(config(ProcedureKind::alpha_spending), p);
    const auto b = run_procedure(two.config, p);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(b[i].level == 2.0 * a[i].level);

    CHECK_THROWS_AS(kfwer_wrap(config(ProcedureKind::alpha_spending), 0), InvalidParameter);
    CHECK_THROWS_AS(kfwer_wrap(config(ProcedureKind::online_sidak), 2), InvalidParameter);
    CHECK_THROWS_AS(kfwer_wrap(config(ProcedureKind::online_fallback), 2), InvalidParameter);
    CHECK(kfwer_wrap(config(ProcedureKind::alpha_spending), 5).warning.has_value());
}

TEST_CASE("saturated k-FWER levels stay below tau") {
    auto w = kfwer_wrap(config(ProcedureKind::discard_spending), 10);
    w.config.series = {SeriesKind::explicit_list, 0.0, {1.0}};
    const auto d = run_procedure(w.config, std::vector<double>{0.1})[0];
    CHECK(d.level < 0.5);
    CHECK(d.level > 0.49);
}

TEST_CASE("spending-family traces pass their audits") {
    for (auto kind : {ProcedureKind::discard_spending, ProcedureKind::adaptive_spending,
                      ProcedureKind::addis_spending, ProcedureKind::addis_local}) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            auto c = config(kind);
            if (kind == ProcedureKind::addis_local) c.lags = LagSchedule::constant(seed % 3);
            CHECK(audit_trace(run_procedure(c, fuzz_stream(seed, 300)), c).passed);
        }
    }
}
