#include "ptolearn/harness/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ptolearn/common.hpp"

namespace ptolearn::harness {

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    require(j.is_object(), std::string(where) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        require(known, std::string(where) + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
void read(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

fnm::LossKind loss_from_string(const std::string& name) {
    if (name == "relative") return fnm::LossKind::Relative;
    if (name == "squared") return fnm::LossKind::Squared;
    throw std::invalid_argument("unknown loss '" + name + "' (expected relative or squared)");
}

std::string to_string(fnm::LossKind kind) { return kind == fnm::LossKind::Relative ? "relative" : "squared"; }

}  // namespace

SweepConfig default_ee_sweep() {
    SweepConfig c;
    c.experiment = "ee_rate";
    c.kind = SweepKind::EndToEnd;
    c.spec = RateSpec{1.0, 1.0, 1.0, 1.5, 0.5, 0.0, 1.0};
    c.nGrid = dyadic_grid(6, 13);
    return c;
}

SweepConfig default_ff_sweep(double r) {
    SweepConfig c;
    std::ostringstream name;
    name << "ff_rate_r" << r;
    c.experiment = name.str();
    c.kind = SweepKind::FullField;
    c.spec = RateSpec{1.0, 1.0, 1.0, 1.5, 0.5, r, 1.0};
    c.qoi = QoIDescriptor::synthetic(r);
    c.nGrid = dyadic_grid(6, 13);
    return c;
}

ComparisonConfig default_comparison(double r) {
    ComparisonConfig c;
    c.alpha = 1.0;
    c.beta = r > -0.5 ? 0.0 : 0.5;
    c.r = r;
    c.nGrid = dyadic_grid(6, 13);
    return c;
}

RateSpec rate_spec_from_json(const json& j, RateSpec s) {
    check_keys(j, "spec", {"alpha", "alphaPrime", "s", "p", "beta", "r", "gammaSq"});
    read(j, "alpha", s.alpha);
    read(j, "alphaPrime", s.alphaPrime);
    read(j, "s", s.s);
    read(j, "p", s.p);
    read(j, "beta", s.beta);
    read(j, "r", s.r);
    read(j, "gammaSq", s.gammaSq);
    return s;
}

json to_json(const RateSpec& s) {
    return {{"alpha", s.alpha}, {"alphaPrime", s.alphaPrime}, {"s", s.s}, {"p", s.p},
            {"beta", s.beta},   {"r", s.r},                   {"gammaSq", s.gammaSq}};
}

QoIDescriptor qoi_from_json(const json& j) {
    check_keys(j, "qoi", {"kind", "r", "scale", "x0"});
    const std::string kind = j.value("kind", std::string("synthetic"));
    const double x0 = j.value("x0", 0.5);
    QoIDescriptor q;
    if (kind == "synthetic" || kind == "synthetic_powerlaw") q = QoIDescriptor::synthetic(j.value("r", 0.5), j.value("scale", 1.0));
    else if (kind == "mean_on_interval") q = QoIDescriptor::mean_on_interval();
    else if (kind == "point_evaluation") q = QoIDescriptor::point_evaluation(x0);
    else if (kind == "derivative_point_evaluation") q = QoIDescriptor::derivative_point_evaluation(x0);
    else throw std::invalid_argument("unknown QoI kind '" + kind + "'");
    require(kind.starts_with("synthetic") || (!j.contains("r") && !j.contains("scale")),
            "qoi: r and scale are fixed by the kind '" + kind + "'");
    return q;
}

json to_json(const QoIDescriptor& q) {
    json j{{"kind", q.name()}, {"r", q.r}};
    if (q.kind == QoIKind::SyntheticPowerLaw) j["scale"] = q.scale;
    if (q.kind == QoIKind::PointEvaluation || q.kind == QoIKind::DerivativePointEvaluation) {
        j["x0"] = q.x0;
        j.erase("r");
    }
    if (q.kind == QoIKind::MeanOnInterval) j.erase("r");
    return j;
}

CoefficientLaw law_from_string(const std::string& name) {
    if (name == "gaussian") return CoefficientLaw::GaussianUnit;
    if (name == "uniform") return CoefficientLaw::UniformUnit;
    throw std::invalid_argument("unknown coefficient law '" + name + "' (expected gaussian or uniform)");
}

std::string to_string(CoefficientLaw law) { return law == CoefficientLaw::GaussianUnit ? "gaussian" : "uniform"; }

SweepKind sweep_kind_from_string(const std::string& name) {
    if (name == "ee") return SweepKind::EndToEnd;
    if (name == "ff") return SweepKind::FullField;
    throw std::invalid_argument("unknown sweep kind '" + name + "' (expected ee or ff)");
}

TruthKind truth_kind_from_string(const std::string& name) {
    if (name == "powerlaw") return TruthKind::PowerLaw;
    if (name == "factorized") return TruthKind::Factorized;
    throw std::invalid_argument("unknown truth '" + name + "' (expected powerlaw or factorized)");
}

SweepConfig sweep_config_from_json(const json& j, SweepConfig c) {
    check_keys(j, "sweep config", {"experiment", "kind", "spec", "nGrid", "truncation", "trials", "seed", "law",
                                   "truth", "qoi", "tolerance", "threads", "output"});
    read(j, "experiment", c.experiment);
    if (j.contains("kind")) c.kind = sweep_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("spec")) c.spec = rate_spec_from_json(j.at("spec"), c.spec);
    read(j, "nGrid", c.nGrid);
    read(j, "truncation", c.truncation);
    read(j, "trials", c.trials);
    read(j, "seed", c.seed);
    if (j.contains("law")) c.law = law_from_string(j.at("law").get<std::string>());
    if (j.contains("truth")) c.truth = truth_kind_from_string(j.at("truth").get<std::string>());
    if (j.contains("qoi")) c.qoi = qoi_from_json(j.at("qoi"));
    read(j, "tolerance", c.tolerance);
    read(j, "threads", c.threads);
    return c;
}

json to_json(const SweepConfig& c) {
    return {{"experiment", c.experiment}, {"kind", c.kind == SweepKind::EndToEnd ? "ee" : "ff"},
            {"spec", to_json(c.spec)},    {"nGrid", c.nGrid},
            {"truncation", c.truncation}, {"trials", c.trials},
            {"seed", c.seed},             {"law", to_string(c.law)},
            {"truth", to_string(c.truth)}, {"qoi", to_json(c.qoi)},
            {"tolerance", c.tolerance}};
}

ComparisonConfig comparison_config_from_json(const json& j, ComparisonConfig c) {
    check_keys(j, "comparison config", {"alpha", "beta", "r", "nGrid", "truncation", "trials", "seed", "law", "rGrid",
                                        "threads", "output"});
    read(j, "alpha", c.alpha);
    read(j, "beta", c.beta);
    read(j, "r", c.r);
    read(j, "nGrid", c.nGrid);
    read(j, "truncation", c.truncation);
    read(j, "trials", c.trials);
    read(j, "seed", c.seed);
    if (j.contains("law")) c.law = law_from_string(j.at("law").get<std::string>());
    read(j, "rGrid", c.rGrid);
    read(j, "threads", c.threads);
    return c;
}

json to_json(const ComparisonConfig& c) {
    return {{"alpha", c.alpha},       {"beta", c.beta},     {"r", c.r},       {"nGrid", c.nGrid},
            {"truncation", c.truncation}, {"trials", c.trials}, {"seed", c.seed}, {"law", to_string(c.law)},
            {"rGrid", c.rGrid}};
}

FnmTaskConfig fnm_task_from_json(const json& j, FnmTaskConfig c) {
    check_keys(j, "FNM task config", {"task", "variants", "nGrid", "seeds", "testCount", "resolution", "klTerms",
                                      "klDecay", "filterWidth", "gain", "model", "optimizer", "threads", "output"});
    if (j.contains("task")) c.task = fnm_task_from_string(j.at("task").get<std::string>());
    if (j.contains("variants")) {
        c.variants.clear();
        for (const auto& name : j.at("variants")) c.variants.push_back(fnm::variant_from_string(name.get<std::string>()));
    }
    read(j, "nGrid", c.nGrid);
    read(j, "seeds", c.seeds);
    read(j, "testCount", c.testCount);
    read(j, "resolution", c.resolution);
    read(j, "klTerms", c.klTerms);
    read(j, "klDecay", c.klDecay);
    read(j, "filterWidth", c.filterWidth);
    read(j, "gain", c.gain);
    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "model", {"width", "modes", "depth", "latentDim", "functionalDim", "auxiliary", "auxiliaryDim",
                                "finalIdentity"});
        read(m, "width", c.model.width);
        read(m, "modes", c.model.modes);
        read(m, "depth", c.model.depth);
        read(m, "latentDim", c.model.latentDim);
        read(m, "functionalDim", c.model.functionalDim);
        read(m, "auxiliary", c.model.auxiliary);
        read(m, "auxiliaryDim", c.model.auxiliaryDim);
        read(m, "finalIdentity", c.model.finalIdentity);
    }
    c.model.resolution = c.resolution;
    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        check_keys(o, "optimizer", {"learningRate", "beta1", "beta2", "epsilon", "weightDecay", "epochs", "batchSize",
                                    "halvingPeriod", "loss"});
        read(o, "learningRate", c.optimizer.learningRate);
        read(o, "beta1", c.optimizer.beta1);
        read(o, "beta2", c.optimizer.beta2);
        read(o, "epsilon", c.optimizer.epsilon);
        read(o, "weightDecay", c.optimizer.weightDecay);
        read(o, "epochs", c.optimizer.epochs);
        read(o, "batchSize", c.optimizer.batchSize);
        read(o, "halvingPeriod", c.optimizer.halvingPeriod);
        if (o.contains("loss")) c.optimizer.loss = loss_from_string(o.at("loss").get<std::string>());
    }
    read(j, "threads", c.threads);
    return c;
}

json to_json(const FnmTaskConfig& c) {
    json variants = json::array();
    for (auto v : c.variants) variants.push_back(fnm::to_string(v));
    const auto& o = c.optimizer;
    return {{"task", to_string(c.task)},
            {"variants", variants},
            {"nGrid", c.nGrid},
            {"seeds", c.seeds},
            {"testCount", c.testCount},
            {"resolution", c.resolution},
            {"klTerms", c.klTerms},
            {"klDecay", c.klDecay},
            {"filterWidth", c.filterWidth},
            {"gain", c.gain},
            {"model",
             {{"width", c.model.width},
              {"modes", c.model.modes},
              {"depth", c.model.depth},
              {"latentDim", c.model.latentDim},
              {"functionalDim", c.model.functionalDim},
              {"auxiliary", c.model.auxiliary},
              {"auxiliaryDim", c.model.auxiliaryDim},
              {"finalIdentity", c.model.finalIdentity}}},
            {"optimizer",
             {{"learningRate", o.learningRate},
              {"beta1", o.beta1},
              {"beta2", o.beta2},
              {"epsilon", o.epsilon},
              {"weightDecay", o.weightDecay},
              {"epochs", o.epochs},
              {"batchSize", o.batchSize},
              {"halvingPeriod", o.halvingPeriod},
              {"loss", to_string(o.loss)}}}};
}

ReportPaths report_paths_from_json(const json& j) {
    ReportPaths paths;
    if (!j.contains("output")) return paths;
    const json& o = j.at("output");
    check_keys(o, "output", {"csv", "json", "svg"});
    read(o, "csv", paths.csv);
    read(o, "json", paths.json);
    read(o, "svg", paths.svg);
    return paths;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("invalid JSON in '" + path + "': " + e.what());
    }
}

}  // namespace ptolearn::harness
