#include "onlinefwer/experiments.hpp"

#include <algorithm>
#include <ostream>

#include "onlinefwer/config_io.hpp"
#include "onlinefwer/errors.hpp"

namespace ofwer {

using nlohmann::json;

namespace {

std::vector<double> pi_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 9; ++k) g.push_back(k / 10.0);
    return g;
}

ProcedureConfig make(ProcedureKind kind, const ExperimentOptions& o, SeriesSpec series = {}) {
    ProcedureConfig c;
    c.kind = kind;
    c.alpha = o.alpha;
    c.series = series;
    return c;
}

ProcedureConfig fallback_one(const ExperimentOptions& o, SeriesSpec series = {}) {
    auto c = make(ProcedureKind::online_fallback, o, series);
    c.fallback_weights = FallbackWeights::one_step();
    c.label = "fallback-1";
    return c;
}

SeriesSpec q2() { return {SeriesKind::q_series, 2.0, {}}; }

SimConfig base_sim(const ExperimentOptions& o) {
    SimConfig s;
    s.T = o.T;
    s.trials = o.trials;
    s.seed = o.seed;
    s.alpha = o.alpha;
    s.threads = o.threads;
    return s;
}

// Cells over mu_N x mu_A x pi_A with the same procedures everywhere.
void pi_sweep(Experiment& e, const ExperimentOptions& o, const std::vector<double>& mu_Ns,
              const std::vector<double>& mu_As, const std::vector<ProcedureConfig>& procs,
              const std::vector<double>& pis = pi_grid()) {
    for (double mu_A : mu_As)
        for (double mu_N : mu_Ns)
            for (double pi : pis) {
                ExperimentCell cell;
                cell.sim = base_sim(o);
                cell.sim.pi_A = pi;
                cell.sim.mu_A = mu_A;
                cell.sim.mu_N = mu_N;
                cell.procedures = procs;
                e.cells.push_back(std::move(cell));
            }
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig1", "fig2", "fig2-cluster", "fig-discard", "fig-adaptive", "fig-addis"};
}

Experiment preset_experiment(const std::string& name, const ExperimentOptions& o) {
    Experiment e;
    e.name = name;
    if (name == "fig1") {
        std::vector<ProcedureConfig> procs;
        for (auto kind : kAllProcedureKinds) procs.push_back(make(kind, o));
        procs.push_back(fallback_one(o));
        pi_sweep(e, o, {0.0, -1.0}, {4.0}, procs);
    } else if (name == "fig2" || name == "fig2-cluster") {
        const std::vector<ProcedureConfig> procs{
            make(ProcedureKind::alpha_spending, o, q2()), make(ProcedureKind::online_sidak, o, q2()),
            fallback_one(o, q2()), make(ProcedureKind::online_fallback, o, q2())};
        const bool cluster = name == "fig2-cluster";
        if (cluster) e.extra_columns = {"r"};
        std::vector<std::pair<double, double>> fr;
        if (cluster)
            for (int k = 0; k <= 8; ++k) fr.emplace_back(0.1, (10 + 2 * k) / 100.0);
        else
            for (double f : pi_grid()) fr.emplace_back(f, 1.0);
        for (auto [f, r] : fr) {
            ExperimentCell cell;
            cell.sim = base_sim(o);
            cell.sim.pi_A = f;
            cell.sim.pi_sequence = clustered_pi(f, r, o.T);
            cell.sim.mu_A = 4.0;
            cell.sim.mu_N = 0.0;
            cell.procedures = procs;
            if (cluster) cell.extra = {r};
            e.cells.push_back(std::move(cell));
        }
    } else if (name == "fig-discard") {
        pi_sweep(e, o, {-2.0, 0.0}, {4.0},
                 {make(ProcedureKind::alpha_spending, o, q2()),
                  make(ProcedureKind::discard_spending, o, q2())});
    } else if (name == "fig-adaptive") {
        pi_sweep(e, o, {0.0, -0.3, -1.0, -1.5}, {4.0},
                 {make(ProcedureKind::alpha_spending, o, q2()),
                  make(ProcedureKind::adaptive_spending, o, q2())});
    } else if (name == "fig-addis") {
        pi_sweep(e, o, {0.0, -0.5, -1.0, -1.5}, {4.0, 5.0},
                 {make(ProcedureKind::addis_spending, o), make(ProcedureKind::discard_spending, o),
                  make(ProcedureKind::adaptive_spending, o), make(ProcedureKind::alpha_spending, o)});
    } else {
        throw InvalidParameter("unknown preset '" + name + "'");
    }
    return e;
}

Experiment experiment_from_json(const json& j, ExperimentOptions o) {
    if (!j.is_object()) throw InvalidParameter("experiment config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        static const std::vector<std::string> allowed{"preset", "procedures", "grid", "trials", "seed",
                                                      "T", "alpha", "block_size", "force_null"};
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw InvalidParameter("unknown key '" + key + "' in experiment config");
    }
    auto positive = [&](const char* key) {
        if (!j[key].is_number_integer() || j[key].get<long long>() <= 0)
            throw InvalidParameter(std::string("'") + key + "' must be a positive integer");
        return j[key].get<std::size_t>();
    };
    if (j.contains("trials")) o.trials = positive("trials");
    if (j.contains("T")) o.T = positive("T");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) throw InvalidParameter("'seed' must be an integer");
        o.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("alpha")) {
        if (!j["alpha"].is_number()) throw InvalidParameter("'alpha' must be a number");
        o.alpha = j["alpha"].get<double>();
    }

    Experiment e;
    if (j.contains("preset")) {
        if (!j["preset"].is_string()) throw InvalidParameter("'preset' must be a string");
        if (j.contains("procedures") || j.contains("grid"))
            throw InvalidParameter("a preset cannot be combined with 'procedures' or 'grid'");
        e = preset_experiment(j["preset"].get<std::string>(), o);
    } else {
        if (!j.contains("procedures") || !j["procedures"].is_array() || j["procedures"].empty())
            throw InvalidParameter("custom experiment needs a non-empty 'procedures' array");
        std::vector<ProcedureConfig> procs;
        for (const auto& p : j["procedures"]) {
            auto c = procedure_from_json(p);
            if (!p.contains("alpha")) c.alpha = o.alpha;
            procs.push_back(std::move(c));
        }
        const json grid = j.value("grid", json::object());
        if (!grid.is_object()) throw InvalidParameter("'grid' must be an object");
        auto axis = [&](const char* key, std::vector<double> fallback) {
            if (!grid.contains(key)) return fallback;
            if (!grid[key].is_array() || grid[key].empty())
                throw InvalidParameter(std::string("grid axis '") + key + "' must be a non-empty array");
            std::vector<double> v;
            for (const auto& x : grid[key]) {
                if (!x.is_number()) throw InvalidParameter(std::string("grid axis '") + key + "' must hold numbers");
                v.push_back(x.get<double>());
            }
            return v;
        };
        for (const auto& [key, value] : grid.items())
            if (key != "pi_A" && key != "mu_A" && key != "mu_N")
                throw InvalidParameter("unknown grid axis '" + key + "'");
        e.name = "custom";
        pi_sweep(e, o, axis("mu_N", {0.0}), axis("mu_A", {4.0}), procs, axis("pi_A", {0.5}));
    }

    for (auto& cell : e.cells) {
        if (j.contains("block_size")) cell.sim.block_size = positive("block_size");
        if (j.contains("force_null")) {
            if (!j["force_null"].is_boolean()) throw InvalidParameter("'force_null' must be a boolean");
            cell.sim.force_null = j["force_null"].get<bool>();
        }
        cell.sim.validate();
        for (const auto& p : cell.procedures) {
            auto findings = validate(p);
            if (!findings.empty()) throw InvalidParameter(p.name() + ": " + findings.front());
        }
    }
    return e;
}

void run_experiment(const Experiment& experiment, std::ostream& out) {
    write_metrics_header(out, experiment.extra_columns);
    for (const auto& cell : experiment.cells) {
        const auto reports = estimate_metrics(cell.procedures, cell.sim);
        for (const auto& r : reports) {
            MetricsRow row;
            row.report = r;
            row.pi_A = cell.sim.pi_A;
            row.mu_A = cell.sim.mu_A;
            row.mu_N = cell.sim.mu_N;
            row.T = cell.sim.T;
            row.alpha = cell.sim.alpha;
            row.extra = cell.extra;
            write_metrics_row(out, row);
        }
        out.flush();
    }
}

}  // namespace ofwer
