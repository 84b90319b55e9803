#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "ptolearn/estimators.hpp"
#include "ptolearn/fnm/checkpoint.hpp"
#include "ptolearn/fnm/model.hpp"
#include "ptolearn/fnm/train.hpp"
#include "ptolearn/harness/config.hpp"
#include "ptolearn/harness/fnm_task.hpp"
#include "ptolearn/harness/lemmas.hpp"
#include "ptolearn/harness/report.hpp"
#include "ptolearn/harness/sweeps.hpp"
#include "ptolearn/qoi_catalog.hpp"
#include "ptolearn/rate_theory.hpp"
#include "ptolearn/risk.hpp"

namespace py = pybind11;
using namespace ptolearn;
using nlohmann::json;

namespace {

py::tuple rate_tuple(const RateResult& r) { return py::make_tuple(r.exponent, r.logFactor); }

Spectrum spectrum_of(const Eigen::VectorXd& values) {
    Spectrum s;
    s.values = values;
    return s;
}

py::dict risk_dict(const RiskReport& r) {
    py::dict d;
    d["bias"] = r.bias;
    d["variance"] = r.variance;
    d["total"] = r.total;
    return d;
}

// Sweep and task configs cross the boundary as JSON text; the Python wrapper handles dicts.
std::string sweep_json(const std::string& configText) {
    using namespace harness;
    const json j = json::parse(configText);
    SweepConfig base = j.value("kind", std::string("ee")) == "ff" ? default_ff_sweep(-0.25) : default_ee_sweep();
    const SweepResult r = run_sweep(sweep_config_from_json(j, base));
    json out = summary_json({r})[0];
    out["csv"] = to_csv({r});
    return out.dump();
}

std::string comparison_json(const std::string& configText) {
    using namespace harness;
    const json j = json::parse(configText);
    const ComparisonConfig c = comparison_config_from_json(j, default_comparison(j.value("r", 1.0)));
    const ComparisonResult r = run_comparison(c);
    json rows = json::array();
    for (const auto& row : r.table.rows)
        rows.push_back({{"r", row.r}, {"rhoEE", row.rhoEE}, {"rhoFF", row.rhoFF}, {"admissible", row.admissible}});
    return json{{"sweeps", summary_json({r.ee, r.ff})},
                {"rhoEE", r.rhoEE},
                {"rhoFF", r.rhoFF},
                {"orderingMatches", r.ordering_matches()},
                {"curve", rows}}
        .dump();
}

std::string fnm_task_json(const std::string& configText) {
    using namespace harness;
    const json j = json::parse(configText);
    const bool identity = j.value("task", std::string("synthetic")) == "identity";
    const FnmTaskConfig c = fnm_task_from_json(j, identity ? default_identity_task() : default_fnm_task());
    const FnmTaskResult r = run_fnm_synthetic(c);
    json rows = json::array();
    for (const auto& m : r.medians)
        rows.push_back({{"variant", fnm::to_string(m.variant)}, {"N", m.n}, {"medianTestError", m.medianTestError}});
    return json{{"task", to_string(r.task)}, {"medians", rows}, {"csv", fnm_table_csv(r)}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of ptolearn";

    py::class_<RateSpec>(m, "RateSpec")
        .def(py::init<>())
        .def(py::init([](double alpha, double alphaPrime, double s, double p, double beta, double r, double gammaSq) {
                 return RateSpec{alpha, alphaPrime, s, p, beta, r, gammaSq};
             }),
             py::arg("alpha") = 1.0, py::arg("alpha_prime") = 1.0, py::arg("s") = 1.0, py::arg("p") = 1.5,
             py::arg("beta") = 0.5, py::arg("r") = 0.0, py::arg("gamma_sq") = 1.0)
        .def_readwrite("alpha", &RateSpec::alpha)
        .def_readwrite("alpha_prime", &RateSpec::alphaPrime)
        .def_readwrite("s", &RateSpec::s)
        .def_readwrite("p", &RateSpec::p)
        .def_readwrite("beta", &RateSpec::beta)
        .def_readwrite("r", &RateSpec::r)
        .def_readwrite("gamma_sq", &RateSpec::gammaSq);

    m.def("ee_rate_optimal", [](const RateSpec& s) { return rate_tuple(ee_rate_optimal(s)); });
    m.def("ee_rate_general", [](const RateSpec& s) { return rate_tuple(ee_rate_general(s)); });
    m.def("ff_rate_powerlaw", [](const RateSpec& s) { return rate_tuple(ff_rate_powerlaw(s)); });
    m.def("ff_rate_sobolev", [](const RateSpec& s) { return rate_tuple(ff_rate_sobolev(s)); });
    m.def("rho_ee", &rho_ee, py::arg("alpha_plus_beta"), py::arg("r"));
    m.def("rho_ff", &rho_ff, py::arg("alpha_plus_beta"), py::arg("r"));
    m.def("compare_exponents", [](double ab, const std::vector<double>& grid) {
        const ExponentTable t = compare_exponents(ab, grid);
        py::list rows;
        for (const auto& row : t.rows) rows.append(py::make_tuple(row.r, row.rhoEE, row.rhoFF, row.admissible));
        py::dict d;
        d["r0"] = t.r0;
        d["r1"] = t.r1;
        d["rho1"] = t.rho1;
        d["rows"] = rows;
        return d;
    });
    m.def("series_oracle_powerlaw", [](double t, double u, double v, double n) {
        const PowerSeries s = series_oracle_powerlaw(t, u, v, n);
        return py::make_tuple(s.sum, s.ratePrediction, s.logFlag);
    });
    m.def("effective_dimension", [](double alpha, double p, const std::vector<double>& mus) {
        std::vector<double> traces;
        for (const auto& row : effective_dimension(alpha, p, mus)) traces.push_back(row.trace);
        return traces;
    });
    m.def("regularized_inverse_residual", &regularized_inverse_residual);

    m.def("spectrum", [](double halfExponent, std::size_t truncation) { return make_spectrum(halfExponent, 1.0, truncation).values; },
          py::arg("half_exponent"), py::arg("truncation"), "Values j^(-2 * half_exponent), j = 1..J");
    m.def(
        "sample_inputs",
        [](double alpha, std::size_t count, std::size_t truncation, std::uint64_t seed, const std::string& law) {
            return sample_inputs(make_spectrum(alpha, 1.0, truncation), harness::law_from_string(law), count, seed);
        },
        py::arg("alpha"), py::arg("count"), py::arg("truncation"), py::arg("seed"), py::arg("law") = "gaussian");

    m.def(
        "e2e_posterior_mean",
        [](const Eigen::MatrixXd& inputs, const Eigen::VectorXd& responses, const Eigen::VectorXd& prior, double gamma) {
            return E2ESolver(inputs, spectrum_of(prior), gamma).mean(responses);
        },
        py::arg("inputs"), py::arg("responses"), py::arg("prior"), py::arg("gamma"));
    m.def(
        "e2e_risk",
        [](const Eigen::VectorXd& truth, const Eigen::MatrixXd& inputs, double gamma, const Eigen::VectorXd& prior,
           const Eigen::VectorXd& test) {
            return risk_dict(e2e_conditional_risk({truth, CoefficientLabel::TruthF}, inputs, gamma, spectrum_of(prior),
                                                  spectrum_of(test)));
        },
        py::arg("truth"), py::arg("inputs"), py::arg("gamma"), py::arg("prior"), py::arg("test"));
    m.def(
        "ff_risk",
        [](const Eigen::VectorXd& operatorTruth, const Eigen::VectorXd& qoi, const Eigen::MatrixXd& inputs,
           const Eigen::VectorXd& prior, const Eigen::VectorXd& test) {
            return risk_dict(ff_conditional_risk({operatorTruth, CoefficientLabel::OperatorL}, {qoi, CoefficientLabel::QoiQ},
                                                 inputs, spectrum_of(prior), spectrum_of(test)));
        },
        py::arg("operator_truth"), py::arg("qoi"), py::arg("inputs"), py::arg("prior"), py::arg("test"));

    m.def(
        "qoi_coefficients",
        [](const std::string& kind, std::size_t truncation, double x0, double r) {
            json j{{"kind", kind}};
            if (kind.starts_with("synthetic")) j["r"] = r;
            if (kind.find("point") != std::string::npos) j["x0"] = x0;
            return qoi_coefficients(harness::qoi_from_json(j), truncation).coeffs;
        },
        py::arg("kind"), py::arg("truncation"), py::arg("x0") = 0.5, py::arg("r") = 0.5);
    m.def(
        "fitted_qoi_decay",
        [](const std::string& kind, std::size_t truncation, double x0, double r) {
            json j{{"kind", kind}};
            if (kind.starts_with("synthetic")) j["r"] = r;
            if (kind.find("point") != std::string::npos) j["x0"] = x0;
            return verify_decay(harness::qoi_from_json(j), truncation).fittedR;
        },
        py::arg("kind"), py::arg("truncation"), py::arg("x0") = 0.5, py::arg("r") = 0.5);

    m.def("verify_lemmas", [](std::uint64_t seed) {
        py::list out;
        for (const auto& c : harness::verify_lemmas(seed)) out.append(py::make_tuple(c.name, c.value, c.passed));
        return out;
    }, py::arg("seed") = 0);

    m.def("_run_sweep", &sweep_json, py::call_guard<py::gil_scoped_release>());
    m.def("_run_comparison", &comparison_json, py::call_guard<py::gil_scoped_release>());
    m.def("_run_fnm_task", &fnm_task_json, py::call_guard<py::gil_scoped_release>());

    py::class_<fnm::FnmModel>(m, "FnmModel")
        .def(py::init([](const std::string& configText, std::uint64_t seed) {
                 return fnm::FnmModel(fnm::config_from_json(json::parse(configText)), seed);
             }),
             py::arg("config_json"), py::arg("seed") = 0)
        .def("forward", &fnm::FnmModel::forward, py::arg("input"), py::arg("resolution") = 0)
        .def("parameter_count", [](const fnm::FnmModel& self) { return fnm::parameter_count(self.parameters()); })
        .def("config_json", [](const fnm::FnmModel& self) { return fnm::config_to_json(self.config()).dump(); })
        .def(
            "fit",
            [](fnm::FnmModel& self, std::vector<Eigen::MatrixXd> inputs, std::vector<Eigen::MatrixXd> targets,
               double learningRate, int epochs, int batchSize, std::uint64_t seed) {
                fnm::OptimizerConfig opt;
                opt.learningRate = learningRate;
                opt.epochs = epochs;
                opt.batchSize = batchSize;
                opt.seed = seed;
                fnm::TrainingData data{std::move(inputs), std::move(targets), 0};
                return fnm::train(self, data, opt).lossHistory;
            },
            py::arg("inputs"), py::arg("targets"), py::arg("learning_rate") = 1e-3, py::arg("epochs") = 100,
            py::arg("batch_size") = 32, py::arg("seed") = 0)
        .def("save", [](const fnm::FnmModel& self, const std::string& path) { fnm::save_checkpoint(path, self); })
        .def_static("load", &fnm::load_checkpoint);
}
