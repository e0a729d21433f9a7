#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "onlinefwer/config.hpp"
#include "onlinefwer/simulation.hpp"

namespace ofwer {

// One grid point: a simulation setting and the procedures compared on it.
struct ExperimentCell {
    SimConfig sim;
    std::vector<ProcedureConfig> procedures;
    std::vector<double> extra;  // values for Experiment::extra_columns
};

struct Experiment {
    std::string name;
    std::vector<std::string> extra_columns;
    std::vector<ExperimentCell> cells;
};

struct ExperimentOptions {
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    std::size_t T = 1000;
    double alpha = 0.2;
    unsigned threads = 0;
};

// fig1, fig2, fig2-cluster, fig-discard, fig-adaptive, fig-addis.
std::vector<std::string> preset_names();
// Throws InvalidParameter for an unknown name.
Experiment preset_experiment(const std::string& name, const ExperimentOptions& options = {});

// {"preset": name} or a custom grid:
//   {"procedures": [<procedure config>...], "grid": {"pi_A": [...], "mu_A": [...], "mu_N": [...]},
//    "trials", "seed", "T", "alpha", "block_size", "force_null"}
// Keys given next to a preset override its options.
Experiment experiment_from_json(const nlohmann::json& j, ExperimentOptions options = {});

// Runs every cell and writes the metrics table.
void run_experiment(const Experiment& experiment, std::ostream& out);

}  // namespace ofwer
