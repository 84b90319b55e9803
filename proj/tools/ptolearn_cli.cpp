#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptolearn/harness/config.hpp"
#include "ptolearn/harness/fnm_task.hpp"
#include "ptolearn/harness/lemmas.hpp"
#include "ptolearn/harness/report.hpp"
#include "ptolearn/harness/sweeps.hpp"
#include "ptolearn/rate_theory.hpp"

using namespace ptolearn;
using namespace ptolearn::harness;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitTolerance = 2;

struct GridFlags {
    std::optional<int> nMinLog2, nMaxLog2;
    std::optional<std::size_t> trials, truncation;
    std::optional<unsigned> threads;
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
    cmd->add_option("--n-min-log2", g.nMinLog2, "Smallest N as a power of two");
    cmd->add_option("--n-max-log2", g.nMaxLog2, "Largest N as a power of two");
    cmd->add_option("--trials", g.trials, "Trials per N");
    cmd->add_option("--truncation", g.truncation, "Truncation J");
    cmd->add_option("--threads", g.threads, "Worker threads (0: hardware concurrency)");
}

template <class Config>
void apply_grid_flags(const GridFlags& g, Config& c) {
    if (g.nMinLog2 || g.nMaxLog2) {
        const int lo = g.nMinLog2.value_or(6), hi = g.nMaxLog2.value_or(13);
        c.nGrid = dyadic_grid(lo, hi);
    }
    if (g.trials) c.trials = *g.trials;
    if (g.truncation) c.truncation = *g.truncation;
    if (g.threads) c.threads = *g.threads;
}

struct OutputFlags {
    std::string csv, json, svg;
};

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
    cmd->add_option("--csv", o.csv, "CSV output path");
    cmd->add_option("--json", o.json, "JSON summary output path");
    cmd->add_option("--svg", o.svg, "SVG log-log plot output path");
}

ReportPaths merged_paths(const json& config, const OutputFlags& o) {
    ReportPaths p = report_paths_from_json(config);
    if (!o.csv.empty()) p.csv = o.csv;
    if (!o.json.empty()) p.json = o.json;
    if (!o.svg.empty()) p.svg = o.svg;
    return p;
}

void print_result(const SweepResult& r) {
    for (std::size_t i = 0; i < r.nGrid.size(); ++i)
        std::printf("  N=%-6zu median risk %.6e\n", r.nGrid[i], r.medians[i]);
    std::printf("%s: slope %.4f +- %.4f, theory %.4f%s, tolerance %.2f: %s\n", r.experiment.c_str(), r.slope(),
                r.fit.slopeStdErr, -r.theory.exponent, r.theory.logFactor ? " (log factor divided out)" : "",
                r.tolerance, r.within_tolerance() ? "PASS" : "FAIL");
}

json rate_entry(auto&& fn, const RateSpec& spec) {
    try {
        const RateResult r = fn(spec);
        return {{"exponent", r.exponent}, {"logFactor", r.logFactor}};
    } catch (const std::domain_error& e) {
        return {{"error", e.what()}};
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-learning rate experiments and Fourier Neural Mapping training"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string configPath;
    app.add_option("--config", configPath, "JSON config file; flags override its values");

    // rate-theory
    auto* rateCmd = app.add_subcommand("rate-theory", "Theoretical exponents and the EE/FF crossing table");
    RateSpec spec;
    rateCmd->add_option("--alpha", spec.alpha);
    rateCmd->add_option("--alpha-prime", spec.alphaPrime);
    rateCmd->add_option("--s", spec.s);
    rateCmd->add_option("--p", spec.p);
    rateCmd->add_option("--beta", spec.beta);
    rateCmd->add_option("--r", spec.r);
    rateCmd->add_option("--gamma-sq", spec.gammaSq);
    int rPoints = 41;
    double rMax = 1.5;
    rateCmd->add_option("--r-points", rPoints, "Points of the crossing table")->check(CLI::Range(2, 100000));
    rateCmd->add_option("--r-max", rMax, "Upper end of the crossing table");

    // sweeps
    auto* eeCmd = app.add_subcommand("sweep-ee", "End-to-end rate sweep");
    auto* ffCmd = app.add_subcommand("sweep-ff", "Full-field rate sweep");
    std::uint64_t seed = 0;
    GridFlags grid;
    OutputFlags out;
    std::optional<double> ffR;
    bool truncationCheck = false;
    for (auto* cmd : {eeCmd, ffCmd}) {
        cmd->add_option("--seed", seed, "Base seed")->required();
        add_grid_flags(cmd, grid);
        add_output_flags(cmd, out);
        cmd->add_flag("--truncation-check", truncationCheck, "Also report the risk change when J is doubled");
    }
    ffCmd->add_option("--r", ffR, "Synthetic QoI decay exponent");

    auto* compareCmd = app.add_subcommand("compare", "Paired EE and FF sweeps on a factorized truth");
    compareCmd->add_option("--seed", seed, "Base seed")->required();
    std::optional<double> cmpAlpha, cmpBeta, cmpR;
    compareCmd->add_option("--alpha", cmpAlpha);
    compareCmd->add_option("--beta", cmpBeta);
    compareCmd->add_option("--r", cmpR, "QoI decay exponent");
    add_grid_flags(compareCmd, grid);
    add_output_flags(compareCmd, out);

    auto* lemmaCmd = app.add_subcommand("verify-lemmas", "Series, effective-dimension and regularized-inverse checks");
    std::uint64_t lemmaSeed = 0;
    lemmaCmd->add_option("--seed", lemmaSeed, "Seed of the random PSD pairs");

    auto* fnmCmd = app.add_subcommand("train-fnm", "Train the four FNM variants on the synthetic task");
    std::optional<std::string> task;
    std::optional<int> epochs;
    std::vector<std::string> variants;
    std::vector<std::size_t> fnmGrid;
    std::vector<std::uint64_t> seeds;
    std::optional<unsigned> fnmThreads;
    std::string fnmCsv;
    fnmCmd->add_option("--task", task, "synthetic or identity");
    fnmCmd->add_option("--epochs", epochs);
    fnmCmd->add_option("--variants", variants, "Subset of F2F F2V V2F V2V");
    fnmCmd->add_option("--n-grid", fnmGrid, "Training-set sizes");
    fnmCmd->add_option("--seeds", seeds);
    fnmCmd->add_option("--threads", fnmThreads);
    fnmCmd->add_option("--csv", fnmCsv, "Per-run CSV output path");

    auto* reportCmd = app.add_subcommand("report", "Re-read sweep CSVs and emit JSON/SVG reports");
    std::vector<std::string> inputs;
    double tolerance = 0.15;
    reportCmd->add_option("inputs", inputs, "Sweep CSV files")->required()->check(CLI::ExistingFile);
    reportCmd->add_option("--tolerance", tolerance);
    add_output_flags(reportCmd, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        const json config = configPath.empty() ? json::object() : load_json_file(configPath);

        if (*rateCmd) {
            RateSpec s = config.contains("spec") ? rate_spec_from_json(config.at("spec")) : RateSpec{};
            for (auto* opt : rateCmd->get_options()) {
                if (opt->count() == 0) continue;
                const std::string name = opt->get_name();
                if (name == "--alpha") s.alpha = spec.alpha;
                if (name == "--alpha-prime") s.alphaPrime = spec.alphaPrime;
                if (name == "--s") s.s = spec.s;
                if (name == "--p") s.p = spec.p;
                if (name == "--beta") s.beta = spec.beta;
                if (name == "--r") s.r = spec.r;
                if (name == "--gamma-sq") s.gammaSq = spec.gammaSq;
            }
            json report{{"spec", to_json(s)},
                        {"eeOptimal", rate_entry(ee_rate_optimal, s)},
                        {"eeGeneral", rate_entry(ee_rate_general, s)},
                        {"ffPowerLaw", rate_entry(ff_rate_powerlaw, s)},
                        {"ffSobolev", rate_entry(ff_rate_sobolev, s)}};
            const double ab = s.alpha + s.beta;
            if (ab > 0.0) {
                std::vector<double> rGrid;
                const double r0 = -0.5 - ab;
                for (int i = 0; i < rPoints; ++i) rGrid.push_back(r0 + (rMax - r0) * i / (rPoints - 1));
                const ExponentTable t = compare_exponents(ab, rGrid);
                json rows = json::array();
                for (const auto& row : t.rows)
                    rows.push_back({{"r", row.r}, {"rhoEE", row.rhoEE}, {"rhoFF", row.rhoFF}, {"admissible", row.admissible}});
                report["comparison"] = {{"alphaPlusBeta", ab}, {"r0", t.r0}, {"r1", t.r1}, {"rho1", t.rho1}, {"rows", rows}};
            }
            std::cout << report.dump(2) << '\n';
            return kExitOk;
        }

        if (*eeCmd || *ffCmd) {
            SweepConfig c = *eeCmd ? default_ee_sweep() : default_ff_sweep(ffR.value_or(-0.25));
            c = sweep_config_from_json(config, c);
            c.seed = seed;
            apply_grid_flags(grid, c);
            if (ffR) {
                c.spec.r = *ffR;
                c.qoi = QoIDescriptor::synthetic(*ffR);
            }
            const SweepResult r = run_sweep(c);
            print_result(r);
            if (truncationCheck) {
                const TruncationCheck t = truncation_check(c);
                std::printf("truncation check at N=%zu: J=%zu risk %.6e, 2J risk %.6e, relative change %.3e\n", t.n,
                            c.truncation, t.risk, t.riskDoubled, t.relativeChange);
            }
            emit_report({r}, merged_paths(config, out));
            return r.within_tolerance() ? kExitOk : kExitTolerance;
        }

        if (*compareCmd) {
            ComparisonConfig c = default_comparison(cmpR.value_or(config.value("r", 1.0)));
            c = comparison_config_from_json(config, c);
            c.seed = seed;
            if (cmpAlpha) c.alpha = *cmpAlpha;
            if (cmpBeta) c.beta = *cmpBeta;
            if (cmpR) c.r = *cmpR;
            apply_grid_flags(grid, c);
            const ComparisonResult r = run_comparison(c);
            print_result(r.ee);
            print_result(r.ff);
            std::printf("rho_EE %.6f, rho_FF %.6f; theory says %s is faster, empirics say %s is faster: %s\n", r.rhoEE,
                        r.rhoFF, r.ff_faster_in_theory() ? "FF" : "EE", r.ff_faster_empirically() ? "FF" : "EE",
                        r.ordering_matches() ? "PASS" : "FAIL");
            ReportPaths paths = merged_paths(config, out);
            const std::string jsonPath = paths.json;
            paths.json.clear();
            emit_report({r.ee, r.ff}, paths);
            if (!jsonPath.empty()) {
                json rows = json::array();
                for (const auto& row : r.table.rows)
                    rows.push_back({{"r", row.r}, {"rhoEE", row.rhoEE}, {"rhoFF", row.rhoFF}, {"admissible", row.admissible}});
                json summary{{"config", to_json(c)},
                             {"sweeps", summary_json({r.ee, r.ff})},
                             {"rhoEE", r.rhoEE},
                             {"rhoFF", r.rhoFF},
                             {"orderingMatches", r.ordering_matches()},
                             {"curve", {{"r0", r.table.r0}, {"r1", r.table.r1}, {"rho1", r.table.rho1}, {"rows", rows}}}};
                write_text(jsonPath, summary.dump(2) + "\n");
            }
            return r.ordering_matches() ? kExitOk : kExitTolerance;
        }

        if (*lemmaCmd) {
            bool ok = true;
            for (const auto& c : verify_lemmas(lemmaSeed)) {
                if (c.isBound)
                    std::printf("%-36s %.3e <= %.1e: %s\n", c.name.c_str(), c.value, c.tolerance, c.passed ? "PASS" : "FAIL");
                else
                    std::printf("%-36s slope %.4f, target %.4f +- %.2f: %s\n", c.name.c_str(), c.value, c.target,
                                c.tolerance, c.passed ? "PASS" : "FAIL");
                ok = ok && c.passed;
            }
            return ok ? kExitOk : kExitTolerance;
        }

        if (*fnmCmd) {
            const FnmTask kind = fnm_task_from_string(task.value_or(config.value("task", std::string("synthetic"))));
            FnmTaskConfig c = fnm_task_from_json(config, kind == FnmTask::Identity ? default_identity_task() : default_fnm_task());
            c.task = kind;
            if (epochs) c.optimizer.epochs = *epochs;
            if (!variants.empty()) {
                c.variants.clear();
                for (const auto& v : variants) c.variants.push_back(fnm::variant_from_string(v));
            }
            if (!fnmGrid.empty()) c.nGrid = fnmGrid;
            if (!seeds.empty()) c.seeds = seeds;
            if (fnmThreads) c.threads = *fnmThreads;
            const FnmTaskResult r = run_fnm_synthetic(c);
            bool ok = true;
            for (auto v : c.variants) {
                std::printf("%s:", fnm::to_string(v).c_str());
                for (auto n : c.nGrid) std::printf("  N=%zu %.4e", n, r.median(v, n));
                std::printf("\n");
            }
            if (c.task == FnmTask::Synthetic) {
                for (auto v : c.variants) {
                    if (v != fnm::Variant::F2F && v != fnm::Variant::F2V) continue;
                    const bool mono = r.monotone(v);
                    std::printf("%s median test error decreasing in N: %s\n", fnm::to_string(v).c_str(), mono ? "PASS" : "FAIL");
                    ok = ok && mono;
                }
            } else {
                for (auto v : c.variants) {
                    if (v != fnm::Variant::F2F) continue;
                    const double err = r.median(v, c.nGrid.back());
                    std::printf("F2F identity relative error %.3e < 1e-2: %s\n", err, err < 1e-2 ? "PASS" : "FAIL");
                    ok = ok && err < 1e-2;
                }
            }
            if (!fnmCsv.empty()) write_text(fnmCsv, fnm_table_csv(r));
            return ok ? kExitOk : kExitTolerance;
        }

        if (*reportCmd) {
            std::vector<CsvRow> rows;
            for (const auto& path : inputs) {
                auto part = parse_csv(read_text(path));
                rows.insert(rows.end(), part.begin(), part.end());
            }
            const auto results = results_from_rows(rows, tolerance);
            bool ok = true;
            for (const auto& r : results) {
                print_result(r);
                ok = ok && r.within_tolerance();
            }
            emit_report(results, merged_paths(config, out));
            return ok ? kExitOk : kExitTolerance;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
