#include "onlinefwer/cli.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "onlinefwer/audit.hpp"
#include "onlinefwer/config_io.hpp"
#include "onlinefwer/errors.hpp"
#include "onlinefwer/experiments.hpp"
#include "onlinefwer/power.hpp"
#include "onlinefwer/scheduler.hpp"
#include "onlinefwer/stream_io.hpp"

namespace ofwer {

namespace {

using nlohmann::json;

// Shortest text that reads back to the same double.
std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidParameter(what + ": '" + s + "' is not a number");
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
    std::vector<double> v;
    for (const auto& part : split(s)) v.push_back(parse_double(part, what));
    if (v.empty()) throw InvalidParameter(what + " is empty");
    return v;
}

std::size_t parse_horizon(const std::string& s) {
    if (s == "inf" || s == "infinity") return kInfiniteHorizon;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used == s.size() && v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw InvalidParameter("horizon '" + s + "' must be a positive integer or 'inf'");
}

// Flags shared by run and validate; values left unset defer to --config.
struct ProcedureFlags {
    std::string config;
    std::string procedure;
    std::optional<double> alpha;
    std::string series;
    std::optional<double> q;
    std::string weights;
    std::string tau;
    std::string lambda;
    std::string lags;
    std::string fallback;
    std::optional<unsigned> k;

    void add_to(CLI::App& app) {
        app.add_option("--config", config, "JSON procedure config (flags override its keys)");
        app.add_option("--procedure", procedure, "procedure name, e.g. addis-spending, fallback-1");
        app.add_option("--alpha", alpha, "target level");
        app.add_option("--series", series, "weight series: q, logq or file");
        app.add_option("--q", q, "series exponent");
        app.add_option("--weights,--series-file", weights, "weights file for --series file");
        app.add_option("--tau", tau, "discarding threshold, a number or comma list");
        app.add_option("--lambda", lambda, "candidate threshold, a number or comma list");
        app.add_option("--lags", lags, "addis-local lags: N, comma list, or batch");
        app.add_option("--fallback-weights", fallback, "lagged-gamma or one-step");
        app.add_option("--k", k, "k-FWER multiplier");
    }

    ProcedureConfig build() const {
        json j = config.empty() ? json::object() : read_json_file(config);
        if (!j.is_object()) throw InvalidParameter("config file must hold a JSON object");
        if (!procedure.empty()) j["procedure"] = procedure;
        if (!j.contains("procedure")) j["procedure"] = "addis-spending";
        if (alpha) j["alpha"] = *alpha;
        if (!series.empty() || q || !weights.empty()) {
            json s = j.value("series", json::object());
            if (!series.empty()) {
                s["kind"] = series;
                if (series != "file") s.erase("path");
            }
            if (q) s["q"] = *q;
            if (!weights.empty()) {
                if (s.value("kind", std::string()) != "file")
                    throw InvalidParameter("--weights requires --series file");
                s["path"] = weights;
            }
            j["series"] = s;
        }
        auto schedule = [](const std::string& text, const char* what) -> json {
            const auto v = parse_doubles(text, what);
            return v.size() == 1 ? json(v[0]) : json(v);
        };
        if (!tau.empty()) j["tau"] = schedule(tau, "--tau");
        if (!lambda.empty()) j["lambda"] = schedule(lambda, "--lambda");
        if (!lags.empty()) {
            if (lags == "batch" || lags == "from-batch-ids") {
                j["lags"] = "from-batch-ids";
            } else {
                std::vector<long long> list;
                for (const auto& part : split(lags)) {
                    const double v = parse_double(part, "--lags");
                    if (v < 0 || v != std::floor(v))
                        throw InvalidParameter("--lags entries must be nonnegative integers");
                    list.push_back(static_cast<long long>(v));
                }
                j["lags"] = list.size() == 1 ? json{{"constant", list[0]}} : json{{"list", list}};
            }
        }
        if (!fallback.empty()) j["fallback_weights"] = fallback;
        if (k) j["k"] = *k;
        return procedure_from_json(j);
    }
};

// Output target: --out file or the provided stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InvalidParameter("cannot open output file '" + path + "'");
            out_ = file_.get();
        }
    }
    std::ostream& operator*() { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

int cmd_run(const ProcedureFlags& flags, const std::string& input, const std::string& format,
            const std::string& out_path, std::ostream& out) {
    const ProcedureConfig config = flags.build();
    require_valid(config);
    const bool batch_lags = config.lags && config.lags->kind() == LagSchedule::Kind::from_batch_ids;
    auto scheduler = make_scheduler(config, SchedulerOptions{.retain_trace = false, .series = {}});
    TraceAuditor auditor(config);

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!input.empty() && input != "-") {
        file.open(input);
        if (!file) throw InvalidInput("cannot open input file '" + input + "'");
        in = &file;
    }
    StreamFormat fmt = format_for_path(input);
    if (format == "csv")
        fmt = StreamFormat::csv;
    else if (format == "jsonl")
        fmt = StreamFormat::jsonl;
    else if (!format.empty())
        throw InvalidParameter("--format must be csv or jsonl");

    Sink sink(out_path, out);
    std::ostream& o = *sink;
    o << "index,p,alpha_i,rejected,selected,candidate\n";
    StreamReader reader(*in, fmt);
    BatchLagTracker tracker;
    while (auto record = reader.next()) {
        Decision d;
        if (batch_lags) {
            if (!record->batch_id)
                throw InputError(record->line, "lags from batch ids need a batch_id on every row");
            std::size_t lag = 0;
            try {
                lag = tracker.next(*record->batch_id);
            } catch (const InvalidInput& e) {
                throw InputError(record->line, e.what());
            }
            d = scheduler->step(record->p, lag);
        } else {
            d = scheduler->step(record->p);
        }
        if (!auditor.observe(d)) throw AuditFailure(auditor.report().message);
        o << d.index << ',' << num(d.p_value) << ',' << num(d.level) << ',' << int(d.rejected) << ','
          << int(d.selected) << ',' << int(d.candidate) << '\n';
    }
    o.flush();
    return kExitOk;
}

int cmd_validate(const ProcedureFlags& flags, std::ostream& out) {
    std::vector<std::string> findings;
    std::optional<ProcedureConfig> config;
    try {
        config = flags.build();
    } catch (const InvalidParameter& e) {
        findings.push_back(e.what());
    }
    if (config) {
        findings = validate(*config);
        try {
            const auto series = config->series.build();
            const auto b = series.normalizer_bracket();
            out << "series " << to_string(series.kind()) << ": normalizer bracket [" << num(b.lower)
                << ", " << num(b.upper) << "], normalizer " << num(series.normalizer()) << '\n';
            if (!(b.lower <= b.upper) || !(series.normalizer() >= b.lower) || !std::isfinite(b.upper))
                findings.push_back("series normalizer is not enclosed by its bracket");
        } catch (const std::exception&) {
            // already reported by validate()
        }
    }
    for (const auto& f : findings) out << "FAIL: " << f << '\n';
    if (findings.empty()) out << "OK: " << config->name() << '\n';
    return findings.empty() ? kExitOk : kExitConfigError;
}

struct SolveFlags {
    std::string solver;
    std::string N = "2,10,100,1000";
    std::string pi_A = "0.5";
    std::string mu_A = "4";
    std::string mu_N = "0";
    double alpha = 0.2;
    std::string series = "q";
    double q = 2.0;
    std::string weights;
    std::size_t horizon = 100;
};

int cmd_solve(const SolveFlags& f, std::ostream& o) {
    if (f.solver == "optimal-q") {
        const double mu = parse_double(f.mu_A, "--mu-A");
        o << "N,q_star,expected_discoveries\n";
        for (const auto& n : split(f.N)) {
            const auto r = optimal_q(parse_horizon(n), mu, f.alpha);
            o << n << ',' << num(r.q) << ',' << num(r.value) << '\n';
        }
    } else if (f.solver == "cstar") {
        o << "pi_A,mu_A,mu_N,cstar\n";
        for (double pi : parse_doubles(f.pi_A, "--pi-A"))
            for (double ma : parse_doubles(f.mu_A, "--mu-A"))
                for (double mn : parse_doubles(f.mu_N, "--mu-N")) {
                    const GaussianMixModel model{pi, ma, mn};
                    o << num(pi) << ',' << num(ma) << ',' << num(mn) << ','
                      << num(cstar_threshold(model)) << '\n';
                }
    } else if (f.solver == "expected-discoveries") {
        SeriesSpec spec;
        if (f.series == "q") {
            spec = {SeriesKind::q_series, f.q, {}};
        } else if (f.series == "logq" || f.series == "log-q") {
            spec = {SeriesKind::log_q_series, f.q, {}};
        } else if (f.series == "file") {
            spec = {SeriesKind::explicit_list, 0.0, read_weights_file(f.weights)};
        } else {
            throw InvalidParameter("--series must be q, logq or file");
        }
        const auto series = spec.build();
        o << "N,pi_A,mu_A,expected_discoveries,error_bound\n";
        for (double pi : parse_doubles(f.pi_A, "--pi-A"))
            for (double mu : parse_doubles(f.mu_A, "--mu-A"))
                for (const auto& n : split(f.N)) {
                    const auto r = expected_true_discoveries_bounded(parse_horizon(n), f.alpha, series, pi, mu);
                    o << n << ',' << num(pi) << ',' << num(mu) << ',' << num(r.value) << ','
                      << num(r.error_bound) << '\n';
                }
    } else if (f.solver == "optimal-gamma") {
        const auto pi = parse_doubles(f.pi_A, "--pi-A");
        const auto mu = parse_doubles(f.mu_A, "--mu-A");
        const auto r = optimal_gamma_varying(pi, mu, f.alpha, f.horizon);
        o << "index,gamma,eta\n";
        for (std::size_t i = 0; i < r.weights.size(); ++i)
            o << i + 1 << ',' << num(r.weights[i]) << ',' << num(r.eta) << '\n';
    } else {
        throw InvalidParameter("unknown solver '" + f.solver +
                               "' (expected optimal-q, cstar, optimal-gamma, expected-discoveries)");
    }
    o.flush();
    return kExitOk;
}

struct ExperimentFlags {
    std::string preset;
    std::string config;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> T;
    std::optional<double> alpha;
    unsigned threads = 0;
};

int cmd_experiment(const ExperimentFlags& f, const std::string& out_path, std::ostream& out) {
    if (f.preset.empty() == f.config.empty())
        throw InvalidParameter("experiment needs exactly one of --preset or --config");
    json j = f.config.empty() ? json{{"preset", f.preset}} : read_json_file(f.config);
    if (!j.is_object()) throw InvalidParameter("experiment config must be a JSON object");
    if (f.trials) j["trials"] = *f.trials;
    if (f.seed) j["seed"] = *f.seed;
    if (f.T) j["T"] = *f.T;
    if (f.alpha) j["alpha"] = *f.alpha;
    ExperimentOptions options;
    options.threads = f.threads;
    const Experiment e = experiment_from_json(j, options);
    Sink sink(out_path, out);
    run_experiment(e, *sink);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online FWER control: run procedures, simulate, solve power problems"};
    app.name("onlinefwer");
    app.require_subcommand(1);

    std::string out_path;

    auto* run = app.add_subcommand("run", "Test a stream of p-values, one decision row per hypothesis");
    ProcedureFlags run_flags;
    run_flags.add_to(*run);
    std::string input;
    std::string format;
    run->add_option("input", input, "CSV or JSONL file with a p column ('-' or omitted: stdin)");
    run->add_option("--format", format, "csv or jsonl (default from file extension)");
    run->add_option("--out", out_path, "output file (default stdout)");

    auto* experiment = app.add_subcommand("experiment", "Run a simulation grid and print the metrics table");
    ExperimentFlags exp_flags;
    experiment->add_option("--preset", exp_flags.preset, "named grid: fig1, fig2, fig2-cluster, fig-discard, fig-adaptive, fig-addis");
    experiment->add_option("--config", exp_flags.config, "JSON experiment config");
    experiment->add_option("--trials", exp_flags.trials, "trials per cell");
    experiment->add_option("--seed", exp_flags.seed, "random seed");
    experiment->add_option("--T", exp_flags.T, "stream length");
    experiment->add_option("--alpha", exp_flags.alpha, "target level");
    experiment->add_option("--threads", exp_flags.threads, "worker threads (0: all cores)");
    experiment->add_option("--out", out_path, "output file (default stdout)");

    auto* solve = app.add_subcommand("solve", "Power-theory solvers");
    SolveFlags solve_flags;
    solve->add_option("solver", solve_flags.solver, "optimal-q, cstar, optimal-gamma or expected-discoveries")->required();
    solve->add_option("--N", solve_flags.N, "horizons, comma separated ('inf' allowed)");
    solve->add_option("--pi-A", solve_flags.pi_A, "non-null probability (list)");
    solve->add_option("--mu-A", solve_flags.mu_A, "alternative mean (list)");
    solve->add_option("--mu-N", solve_flags.mu_N, "null mean (list)");
    solve->add_option("--alpha", solve_flags.alpha, "target level");
    solve->add_option("--series", solve_flags.series, "q, logq or file");
    solve->add_option("--q", solve_flags.q, "series exponent");
    solve->add_option("--weights", solve_flags.weights, "weights file for --series file");
    solve->add_option("--horizon", solve_flags.horizon, "optimal-gamma horizon");
    solve->add_option("--out", out_path, "output file (default stdout)");

    auto* validate_cmd = app.add_subcommand("validate", "Check a procedure configuration");
    ProcedureFlags validate_flags;
    validate_flags.add_to(*validate_cmd);

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags, input, format, out_path, out);
        if (experiment->parsed()) return cmd_experiment(exp_flags, out_path, out);
        if (solve->parsed()) {
            Sink sink(out_path, out);
            return cmd_solve(solve_flags, *sink);
        }
        return cmd_validate(validate_flags, out);
    } catch (const InvalidInput& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const AuditFailure& e) {
        err << "audit failure: " << e.what() << '\n';
        return kExitAuditFailure;
    } catch (const Infeasible& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::out_of_range& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

}  // namespace ofwer
