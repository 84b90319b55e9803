#pragma once

// JSON configuration for the harness. Every key is optional; missing keys keep the value of
// the base config passed in, and unknown keys are rejected so typos do not pass silently.
//
// Sweep example:
//   {"experiment": "ee_rate", "kind": "ee",
//    "spec": {"alpha": 1, "alphaPrime": 1, "s": 1, "p": 1.5, "beta": 0.5, "r": 0, "gammaSq": 1},
//    "nGrid": [64, 128], "truncation": 2048, "trials": 20, "seed": 7, "law": "gaussian",
//    "truth": "powerlaw", "qoi": {"kind": "synthetic", "r": 0.5}, "tolerance": 0.15,
//    "output": {"csv": "out.csv", "json": "out.json", "svg": "out.svg"}}

#include "json.hpp"
#include "ptolearn/harness/fnm_task.hpp"
#include "ptolearn/harness/report.hpp"
#include "ptolearn/harness/sweeps.hpp"

namespace ptolearn::harness {

using nlohmann::json;

/// Configs of the default acceptance runs.
SweepConfig default_ee_sweep();
SweepConfig default_ff_sweep(double r);
/// r = 1 uses alpha = 1, beta = 0. r = -0.9 needs alpha + beta + r > 1/2 and uses alpha = 1, beta = 0.5.
ComparisonConfig default_comparison(double r);

RateSpec rate_spec_from_json(const json& j, RateSpec base = {});
json to_json(const RateSpec& spec);

QoIDescriptor qoi_from_json(const json& j);
json to_json(const QoIDescriptor& qoi);

CoefficientLaw law_from_string(const std::string& name);
std::string to_string(CoefficientLaw law);
SweepKind sweep_kind_from_string(const std::string& name);
TruthKind truth_kind_from_string(const std::string& name);

SweepConfig sweep_config_from_json(const json& j, SweepConfig base);
json to_json(const SweepConfig& config);

ComparisonConfig comparison_config_from_json(const json& j, ComparisonConfig base);
json to_json(const ComparisonConfig& config);

FnmTaskConfig fnm_task_from_json(const json& j, FnmTaskConfig base);
json to_json(const FnmTaskConfig& config);

/// Reads the "output" object; absent keys stay empty.
ReportPaths report_paths_from_json(const json& j);

json load_json_file(const std::string& path);

}  // namespace ptolearn::harness
