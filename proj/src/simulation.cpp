#include "onlinefwer/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <string>
#include <thread>

#include "onlinefwer/audit.hpp"
#include "onlinefwer/errors.hpp"
#include "onlinefwer/normal.hpp"
#include "onlinefwer/scheduler.hpp"

namespace ofwer {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t index,
                       std::uint64_t channel) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ index);
    h = splitmix64(h ^ channel);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double SimConfig::pi_at(std::size_t i) const {
    if (pi_sequence.empty()) return pi_A;
    return pi_sequence[std::min(i, pi_sequence.size()) - 1];
}

double SimConfig::mu_at(std::size_t i) const {
    if (mu_sequence.empty()) return mu_A;
    return mu_sequence[std::min(i, mu_sequence.size()) - 1];
}

void SimConfig::validate() const {
    if (T == 0) throw InvalidParameter("horizon T must be positive");
    if (trials == 0) throw InvalidParameter("trials must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    if (block_size == 0) throw InvalidParameter("block size must be positive");
    if (!(pi_A >= 0.0 && pi_A <= 1.0)) throw InvalidParameter("pi_A must lie in [0,1]");
    for (double p : pi_sequence)
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("pi_Ai must lie in [0,1]");
    if (!pi_sequence.empty() && pi_sequence.size() != T)
        throw InvalidParameter("pi sequence must have T entries");
    if (!mu_sequence.empty() && mu_sequence.size() != T)
        throw InvalidParameter("mu sequence must have T entries");
    if (!std::isfinite(mu_A) || !std::isfinite(mu_N)) throw InvalidParameter("means must be finite");
    if (mu_N > 0.0) throw InvalidParameter("mu_N must be <= 0");
}

std::vector<double> clustered_pi(double f, double r, std::size_t T) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidParameter("f must lie in [0,1]");
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidParameter("r must lie in [0,1]");
    const auto prefix = static_cast<std::size_t>(std::floor(static_cast<double>(T) * r));
    std::vector<double> pi(T, 0.0);
    std::fill(pi.begin(), pi.begin() + static_cast<std::ptrdiff_t>(std::min(prefix, T)), f);
    return pi;
}

Stream gen_stream(const SimConfig& config, std::uint64_t trial) {
    Stream s;
    s.p.resize(config.T);
    s.non_null.resize(config.T);
    s.lags.resize(config.T);
    double x = 0.0;
    for (std::size_t i = 1; i <= config.T; ++i) {
        const std::size_t pos = (i - 1) % config.block_size;
        if (pos == 0) {
            const std::size_t block = (i - 1) / config.block_size + 1;
            x = normal_quantile(counter_uniform(config.seed, trial, block, 1));
        }
        const bool alt = !config.force_null && counter_uniform(config.seed, trial, i, 0) < config.pi_at(i);
        const double z = x + (alt ? config.mu_at(i) : config.mu_N);
        s.p[i - 1] = normal_sf(z);
        s.non_null[i - 1] = alt ? 1 : 0;
        s.lags[i - 1] = pos;
    }
    return s;
}

namespace {

struct TrialOutcome {
    std::uint32_t false_rejections = 0;
    std::uint32_t rejections = 0;
    std::uint32_t true_rejections = 0;
};

struct Prepared {
    ProcedureConfig config;
    WeightSeries series;
    bool batch_lags;
    bool keep_trace;
};

Prepared prepare(const ProcedureConfig& c, const SimConfig& sim) {
    auto findings = validate(c);
    if (!findings.empty()) throw InvalidParameter(c.name() + ": " + findings.front());
    const bool batch = c.lags && c.lags->kind() == LagSchedule::Kind::from_batch_ids;
    if (c.lags && c.lags->kind() == LagSchedule::Kind::list && c.lags->lags().size() < sim.T)
        throw InvalidParameter(c.name() + ": lag list is shorter than the horizon T");
    const bool history = (c.tau && c.tau->needs_history()) || (c.lambda && c.lambda->needs_history());
    return {c, c.series.build(), batch, history};
}

TrialOutcome run_one(const Prepared& prep, const Stream& stream) {
    SchedulerOptions options;
    options.retain_trace = prep.keep_trace;
    options.series = prep.series;
    auto scheduler = make_scheduler(prep.config, std::move(options));
    TraceAuditor auditor(prep.config);
    TrialOutcome out;
    for (std::size_t i = 0; i < stream.p.size(); ++i) {
        const Decision d = prep.batch_lags ? scheduler->step(stream.p[i], stream.lags[i])
                                           : scheduler->step(stream.p[i]);
        if (!auditor.observe(d))
            throw AuditFailure(prep.config.name() + " failed audit: " + auditor.report().message +
                               " [" + auditor.report().constraint + "]");
        if (d.rejected) {
            ++out.rejections;
            if (stream.non_null[i])
                ++out.true_rejections;
            else
                ++out.false_rejections;
        }
    }
    return out;
}

double indicator_se(double p, std::size_t n) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / n); }

// Mean and standard error of the mean, accumulated in trial order.
struct MeanSe {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double se() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(sum_sq - static_cast<double>(n) * m * m, 0.0) / (n - 1);
        return std::sqrt(var / static_cast<double>(n));
    }
};

}  // namespace

std::vector<MetricsReport> estimate_metrics(std::span<const ProcedureConfig> procedures,
                                            const SimConfig& config) {
    config.validate();
    std::vector<Prepared> prepared;
    prepared.reserve(procedures.size());
    for (const auto& c : procedures) prepared.push_back(prepare(c, config));

    const std::size_t n_proc = prepared.size();
    const std::size_t n_trials = config.trials;
    std::vector<TrialOutcome> outcomes(n_proc * n_trials);
    std::vector<std::uint32_t> non_nulls(n_trials);

    auto work = [&](std::size_t first, std::size_t last) {
        for (std::size_t t = first; t < last; ++t) {
            const Stream stream = gen_stream(config, t);
            non_nulls[t] = static_cast<std::uint32_t>(
                std::count(stream.non_null.begin(), stream.non_null.end(), 1));
            for (std::size_t k = 0; k < n_proc; ++k)
                outcomes[k * n_trials + t] = run_one(prepared[k], stream);
        }
    };

    unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_trials)));
    if (threads == 1) {
        work(0, n_trials);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (n_trials + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t first = w * chunk;
            const std::size_t last = std::min(n_trials, first + chunk);
            pool.emplace_back([&, w, first, last] {
                try {
                    work(first, last);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<MetricsReport> reports;
    reports.reserve(n_proc);
    for (std::size_t k = 0; k < n_proc; ++k) {
        const unsigned kk = prepared[k].config.k;
        std::size_t any_false = 0;
        std::size_t at_least_k = 0;
        MeanSe pfer, power, fdp;
        double rejections = 0.0;
        std::size_t max_false = 0;
        for (std::size_t t = 0; t < n_trials; ++t) {
            const auto& o = outcomes[k * n_trials + t];
            if (o.false_rejections >= 1) ++any_false;
            if (o.false_rejections >= kk) ++at_least_k;
            pfer.add(o.false_rejections);
            power.add(non_nulls[t] == 0 ? 1.0
                                        : static_cast<double>(o.true_rejections) / non_nulls[t]);
            fdp.add(o.rejections == 0 ? 0.0
                                      : static_cast<double>(o.false_rejections) / o.rejections);
            rejections += o.rejections;
            max_false = std::max<std::size_t>(max_false, o.false_rejections);
        }
        MetricsReport r;
        r.procedure = prepared[k].config.name();
        r.trials = n_trials;
        r.k = kk;
        r.fwer = static_cast<double>(any_false) / n_trials;
        r.fwer_se = indicator_se(r.fwer, n_trials);
        r.kfwer = static_cast<double>(at_least_k) / n_trials;
        r.kfwer_se = indicator_se(r.kfwer, n_trials);
        r.pfer = pfer.mean();
        r.pfer_se = pfer.se();
        r.power = power.mean();
        r.power_se = power.se();
        r.fdr = fdp.mean();
        r.fdr_se = fdp.se();
        r.mean_rejections = rejections / n_trials;
        r.mean_false = r.pfer;
        r.max_false = max_false;
        r.audited_traces = n_trials;
        reports.push_back(std::move(r));
    }
    return reports;
}

MetricsReport estimate_metrics(const ProcedureConfig& procedure, const SimConfig& config) {
    return estimate_metrics(std::span<const ProcedureConfig>(&procedure, 1), config).front();
}

double combined_se(double se_a, double se_b) { return std::sqrt(se_a * se_a + se_b * se_b); }

namespace {

void put(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out << buf;
}

}  // namespace

void write_metrics_header(std::ostream& out, std::span<const std::string> extra_columns) {
    out << "procedure,pi_A,mu_A,mu_N,T,alpha,fwer,fwer_se,pfer,power,power_se,fdr";
    for (const auto& c : extra_columns) out << ',' << c;
    out << '\n';
}

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
    const auto& r = row.report;
    out << r.procedure << ',';
    put(out, row.pi_A);
    out << ',';
    put(out, row.mu_A);
    out << ',';
    put(out, row.mu_N);
    out << ',' << row.T << ',';
    put(out, row.alpha);
    for (double v : {r.fwer, r.fwer_se, r.pfer, r.power, r.power_se, r.fdr}) {
        out << ',';
        put(out, v);
    }
    for (double v : row.extra) {
        out << ',';
        put(out, v);
    }
    out << '\n';
}

}  // namespace ofwer
