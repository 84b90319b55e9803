#pragma once

// Rate-verification sweeps: analytic conditional risks over an (N, trial) grid, medians over
// trials and a log-log slope fit compared against the theoretical exponent.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ptolearn/common.hpp"
#include "ptolearn/qoi_catalog.hpp"
#include "ptolearn/rate_theory.hpp"
#include "ptolearn/spectral_model.hpp"

namespace ptolearn::harness {

enum class SweepKind { EndToEnd, FullField };

/// PowerLaw: f_j = c j^{-s-1/2-0.01} with ||f||_{H^s} = 1.
/// Factorized: f_j = q_j l_j with l_j = j^{-beta-1/2-0.01}, the truth shared by both approaches.
enum class TruthKind { PowerLaw, Factorized };

std::string to_string(SweepKind kind);
std::string to_string(TruthKind kind);

struct SweepConfig {
    std::string experiment = "sweep";
    SweepKind kind = SweepKind::EndToEnd;
    RateSpec spec;
    std::vector<std::size_t> nGrid;
    std::size_t truncation = 2048;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    CoefficientLaw law = CoefficientLaw::GaussianUnit;
    TruthKind truth = TruthKind::PowerLaw;
    QoIDescriptor qoi = QoIDescriptor::synthetic(0.5);  // full-field sweeps and factorized truths
    double tolerance = 0.15;
    unsigned threads = 0;  // 0 uses the hardware concurrency

    void validate() const;
};

/// {2^lo, ..., 2^hi}
std::vector<std::size_t> dyadic_grid(int lo, int hi);

struct SweepRecord {
    std::size_t n = 0;
    std::size_t trial = 0;
    double risk = 0.0;
};

struct SweepResult {
    std::string experiment;
    SweepKind kind = SweepKind::EndToEnd;
    std::vector<SweepRecord> records;  // ordered by (N, trial)
    std::vector<std::size_t> nGrid;
    std::vector<double> medians;       // median risk over trials, per N
    std::size_t fitFrom = 0;           // first grid index used in the slope fit
    LinearFit fit;                     // log median (divided by log 2N in log cases) against log N
    RateResult theory;
    double tolerance = 0.15;

    double slope() const { return fit.slope; }
    bool within_tolerance() const;
};

CoefficientVector ee_truth(const SweepConfig& config, std::size_t truncation);
CoefficientVector ff_truth(double beta, std::size_t truncation);

/// Theoretical rate for the sweep: ee_rate_optimal when p = s + 1/2, ee_rate_general otherwise,
/// ff_rate_powerlaw for full-field sweeps (with r taken from the QoI).
RateResult sweep_theory(const SweepConfig& config);

/// Conditional risk of one (N, trial) cell at truncation J.
double sweep_cell_risk(const SweepConfig& config, std::size_t n, std::size_t trial);

SweepResult run_ee_sweep(const SweepConfig& config);
SweepResult run_ff_sweep(const SweepConfig& config);
SweepResult run_sweep(const SweepConfig& config);

/// Median-and-fit step on externally supplied records (also used when re-reading reports).
void summarize(SweepResult& result);

/// Risk at the largest N of trial 0 with truncation J and 2J on a shared input draw; the
/// J-model uses the first J coordinates of the 2J sequences.
struct TruncationCheck {
    std::size_t n = 0;
    double risk = 0.0;
    double riskDoubled = 0.0;
    double relativeChange = 0.0;
};
TruncationCheck truncation_check(const SweepConfig& config);

struct ComparisonConfig {
    double alpha = 1.0;
    double beta = 0.0;
    double r = 1.0;
    std::vector<std::size_t> nGrid;
    std::size_t truncation = 2048;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    CoefficientLaw law = CoefficientLaw::GaussianUnit;
    std::vector<double> rGrid;  // curve table abscissae
    unsigned threads = 0;
};

struct ComparisonResult {
    SweepResult ee;
    SweepResult ff;
    double rhoEE = 0.0;
    double rhoFF = 0.0;
    ExponentTable table;

    bool ff_faster_empirically() const { return ff.slope() < ee.slope(); }
    bool ff_faster_in_theory() const { return rhoFF > rhoEE; }
    bool ordering_matches() const;
};

/// Sweep configs of the EE/FF comparison: alpha' = alpha, p = beta + r + 1, s = beta + r + 1/2,
/// gamma = 1, factorized truth and a synthetic QoI of decay r.
SweepConfig comparison_sweep(const ComparisonConfig& config, SweepKind kind);
ComparisonResult run_comparison(const ComparisonConfig& config);

}  // namespace ptolearn::harness
