#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "onlinefwer/audit.hpp"
#include "onlinefwer/cli.hpp"
#include "onlinefwer/config_io.hpp"
#include "onlinefwer/errors.hpp"
#include "onlinefwer/power.hpp"
#include "onlinefwer/scheduler.hpp"
#include "onlinefwer/simulation.hpp"

namespace py = pybind11;
using namespace ofwer;

namespace {

// Configs cross the boundary as JSON text; the Python side uses json.dumps.
ProcedureConfig parse(const std::string& text) { return procedure_from_json_text(text); }

std::size_t horizon(const py::object& n) {
    if (py::isinstance<py::float_>(n) && std::isinf(n.cast<double>())) return kInfiniteHorizon;
    return n.cast<std::size_t>();
}

class PyScheduler {
public:
    explicit PyScheduler(const std::string& config) : impl_(make_scheduler(parse(config))) {}
    Decision step(double p, std::optional<std::size_t> lag) {
        return lag ? impl_->step(p, *lag) : impl_->step(p);
    }
    std::vector<Decision> trace() const { return {impl_->trace().begin(), impl_->trace().end()}; }
    std::size_t steps() const { return impl_->steps(); }
    std::string config() const { return procedure_to_json(impl_->config()).dump(); }

private:
    std::unique_ptr<Scheduler> impl_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Online FWER control procedures, simulation harness and power solvers";

    py::register_exception<AuditFailure>(m, "AuditFailure", PyExc_RuntimeError);
    py::register_exception<Infeasible>(m, "Infeasible", PyExc_RuntimeError);

    py::class_<Decision>(m, "Decision")
        .def(py::init<>())
        .def_readwrite("index", &Decision::index)
        .def_readwrite("p_value", &Decision::p_value)
        .def_readwrite("level", &Decision::level)
        .def_readwrite("tau", &Decision::tau)
        .def_readwrite("lambda_", &Decision::lambda)
        .def_readwrite("beta", &Decision::beta)
        .def_readwrite("selected", &Decision::selected)
        .def_readwrite("candidate", &Decision::candidate)
        .def_readwrite("rejected", &Decision::rejected)
        .def("__eq__", [](const Decision& a, const Decision& b) { return a == b; })
        .def("__repr__", [](const Decision& d) {
            std::ostringstream os;
            os << "Decision(index=" << d.index << ", p=" << d.p_value << ", level=" << d.level
               << ", rejected=" << (d.rejected ? "True" : "False") << ")";
            return os.str();
        });

    py::class_<PyScheduler>(m, "Scheduler")
        .def(py::init<const std::string&>(), py::arg("config_json"))
        .def("step", &PyScheduler::step, py::arg("p"), py::arg("lag") = py::none())
        .def("trace", &PyScheduler::trace)
        .def_property_readonly("steps", &PyScheduler::steps)
        .def_property_readonly("config_json", &PyScheduler::config);

    m.def("run", [](const std::string& config, const std::vector<double>& p, const std::vector<std::size_t>& lags) {
        return run_procedure(parse(config), p, lags);
    }, py::arg("config_json"), py::arg("p_values"), py::arg("lags") = std::vector<std::size_t>{});

    m.def("normalize_config", [](const std::string& config) { return procedure_to_json(parse(config)).dump(); });
    m.def("validate_config", [](const std::string& config) { return validate(parse(config)); });

    py::class_<AuditReport>(m, "AuditReport")
        .def_readonly("passed", &AuditReport::passed)
        .def_readonly("checked", &AuditReport::checked)
        .def_readonly("first_violation", &AuditReport::first_violation)
        .def_readonly("constraint", &AuditReport::constraint)
        .def_readonly("message", &AuditReport::message)
        .def_readonly("max_usage", &AuditReport::max_usage);
    m.def("audit", [](const std::vector<Decision>& trace, const std::string& config) {
        return audit_trace(trace, parse(config));
    }, py::arg("trace"), py::arg("config_json"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("pi_A", &SimConfig::pi_A)
        .def_readwrite("pi_sequence", &SimConfig::pi_sequence)
        .def_readwrite("mu_A", &SimConfig::mu_A)
        .def_readwrite("mu_sequence", &SimConfig::mu_sequence)
        .def_readwrite("mu_N", &SimConfig::mu_N)
        .def_readwrite("T", &SimConfig::T)
        .def_readwrite("alpha", &SimConfig::alpha)
        .def_readwrite("trials", &SimConfig::trials)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("force_null", &SimConfig::force_null)
        .def_readwrite("block_size", &SimConfig::block_size)
        .def_readwrite("threads", &SimConfig::threads)
        .def("validate", &SimConfig::validate);

    py::class_<Stream>(m, "Stream")
        .def_readonly("p", &Stream::p)
        .def_property_readonly("non_null", [](const Stream& s) {
            return std::vector<bool>(s.non_null.begin(), s.non_null.end());
        })
        .def_readonly("lags", &Stream::lags);
    m.def("gen_stream", &gen_stream, py::arg("sim"), py::arg("trial"));
    m.def("clustered_pi", &clustered_pi, py::arg("f"), py::arg("r"), py::arg("T"));

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("procedure", &MetricsReport::procedure)
        .def_readonly("trials", &MetricsReport::trials)
        .def_readonly("k", &MetricsReport::k)
        .def_readonly("fwer", &MetricsReport::fwer)
        .def_readonly("fwer_se", &MetricsReport::fwer_se)
        .def_readonly("pfer", &MetricsReport::pfer)
        .def_readonly("pfer_se", &MetricsReport::pfer_se)
        .def_readonly("power", &MetricsReport::power)
        .def_readonly("power_se", &MetricsReport::power_se)
        .def_readonly("fdr", &MetricsReport::fdr)
        .def_readonly("fdr_se", &MetricsReport::fdr_se)
        .def_readonly("kfwer", &MetricsReport::kfwer)
        .def_readonly("kfwer_se", &MetricsReport::kfwer_se)
        .def_readonly("mean_rejections", &MetricsReport::mean_rejections)
        .def_readonly("mean_false", &MetricsReport::mean_false);
    m.def("estimate_metrics", [](const std::vector<std::string>& configs, const SimConfig& sim) {
        std::vector<ProcedureConfig> procs;
        for (const auto& c : configs) procs.push_back(parse(c));
        py::gil_scoped_release release;
        return estimate_metrics(procs, sim);
    }, py::arg("configs_json"), py::arg("sim"));

    m.def("cstar", [](double pi_A, double mu_A, double mu_N) {
        return cstar_threshold({pi_A, mu_A, mu_N});
    }, py::arg("pi_A"), py::arg("mu_A"), py::arg("mu_N"));
    m.def("optimal_q", [](const py::object& N, double mu_A, double alpha) {
        const auto r = optimal_q(horizon(N), mu_A, alpha);
        return py::make_tuple(r.q, r.value);
    }, py::arg("N"), py::arg("mu_A"), py::arg("alpha") = 0.2);
    m.def("expected_discoveries", [](const py::object& N, double alpha, const std::string& series, double pi_A,
                                     double mu_A) {
        const auto r = expected_true_discoveries_bounded(horizon(N), alpha,
                                                         series_from_json(nlohmann::json::parse(series)).build(),
                                                         pi_A, mu_A);
        return py::make_tuple(r.value, r.error_bound);
    }, py::arg("N"), py::arg("alpha"), py::arg("series_json"), py::arg("pi_A"), py::arg("mu_A"));
    m.def("optimal_gamma", [](const std::vector<double>& pi, const std::vector<double>& mu, double alpha,
                              std::size_t horizon) {
        const auto r = optimal_gamma_varying(pi, mu, alpha, horizon);
        return py::make_tuple(r.weights, r.eta);
    }, py::arg("pi"), py::arg("mu"), py::arg("alpha"), py::arg("horizon"));

    m.def("cli", [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"onlinefwer"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : all) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
