#include "ptolearn/harness/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ptolearn/risk.hpp"

namespace ptolearn::harness {

namespace {

constexpr double kTruthNudge = 0.01;
constexpr double kBoundaryTol = 1e-12;

unsigned worker_count(unsigned requested, std::size_t tasks) {
    unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

/// Runs body(i) for i in [0, count) on a pool; results must be written to slot i only.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    const unsigned workers = worker_count(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failureMutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double qoi_decay(const SweepConfig& c) { return c.qoi.decay_exponent(); }

Spectrum training_spectrum(const SweepConfig& c, std::size_t j) { return make_spectrum(c.spec.alpha, 1.0, j); }
Spectrum test_spectrum(const SweepConfig& c, std::size_t j) { return make_spectrum(c.spec.alphaPrime, 1.0, j); }

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t trial) {
    return stream_seed(trial_seed(seed, trial), n);
}

double cell_risk(const SweepConfig& c, const CoefficientVector& truth, const CoefficientVector& qoi,
                 const Eigen::MatrixXd& inputs) {
    const std::size_t j = static_cast<std::size_t>(inputs.cols());
    if (c.kind == SweepKind::EndToEnd)
        return e2e_conditional_risk(truth, inputs, std::sqrt(c.spec.gammaSq), make_spectrum(c.spec.p, 1.0, j),
                                    test_spectrum(c, j))
            .total;
    return ff_conditional_risk(truth, qoi, inputs, make_spectrum(c.spec.beta + 0.5, 1.0, j), test_spectrum(c, j))
        .total;
}

CoefficientVector sweep_truth(const SweepConfig& c, std::size_t j) {
    return c.kind == SweepKind::EndToEnd ? ee_truth(c, j) : ff_truth(c.spec.beta, j);
}

}  // namespace

std::string to_string(SweepKind kind) { return kind == SweepKind::EndToEnd ? "EE" : "FF"; }
std::string to_string(TruthKind kind) { return kind == TruthKind::PowerLaw ? "powerlaw" : "factorized"; }

std::vector<std::size_t> dyadic_grid(int lo, int hi) {
    require(0 <= lo && lo <= hi && hi < 63, "dyadic_grid: need 0 <= lo <= hi < 63");
    std::vector<std::size_t> grid;
    for (int k = lo; k <= hi; ++k) grid.push_back(std::size_t{1} << k);
    return grid;
}

void SweepConfig::validate() const {
    require(!nGrid.empty(), "sweep '" + experiment + "': empty N grid");
    require(nGrid.front() >= 1, "sweep '" + experiment + "': N must be at least 1");
    for (std::size_t i = 1; i < nGrid.size(); ++i)
        require(nGrid[i] > nGrid[i - 1], "sweep '" + experiment + "': N grid must be strictly increasing");
    require(trials >= 1, "sweep '" + experiment + "': trials must be at least 1");
    require(truncation >= 1, "sweep '" + experiment + "': truncation must be at least 1");
    require(spec.gammaSq >= 0.0, "sweep '" + experiment + "': gammaSq must be nonnegative");
    require(tolerance > 0.0, "sweep '" + experiment + "': tolerance must be positive");
}

bool SweepResult::within_tolerance() const {
    return std::isfinite(fit.slope) && std::abs(fit.slope + theory.exponent) <= tolerance;
}

CoefficientVector ee_truth(const SweepConfig& c, std::size_t j) {
    CoefficientVector f;
    f.label = CoefficientLabel::TruthF;
    if (c.truth == TruthKind::Factorized) {
        const CoefficientVector q = qoi_coefficients(c.qoi, j);
        f.coeffs = q.coeffs.cwiseProduct(ff_truth(c.spec.beta, j).coeffs);
        return f;
    }
    f.coeffs.resize(static_cast<Eigen::Index>(j));
    for (std::size_t k = 1; k <= j; ++k)
        f.coeffs[static_cast<Eigen::Index>(k - 1)] = std::pow(static_cast<double>(k), -c.spec.s - 0.5 - kTruthNudge);
    f.coeffs /= f.sobolev_norm(c.spec.s);
    return f;
}

CoefficientVector ff_truth(double beta, std::size_t j) {
    CoefficientVector l;
    l.label = CoefficientLabel::OperatorL;
    l.coeffs.resize(static_cast<Eigen::Index>(j));
    for (std::size_t k = 1; k <= j; ++k)
        l.coeffs[static_cast<Eigen::Index>(k - 1)] = std::pow(static_cast<double>(k), -beta - 0.5 - kTruthNudge);
    return l;
}

RateResult sweep_theory(const SweepConfig& c) {
    if (c.kind == SweepKind::EndToEnd) {
        if (std::abs(c.spec.p - (c.spec.s + 0.5)) <= kBoundaryTol) return ee_rate_optimal(c.spec);
        return ee_rate_general(c.spec);
    }
    RateSpec spec = c.spec;
    spec.r = qoi_decay(c);
    return ff_rate_powerlaw(spec);
}

double sweep_cell_risk(const SweepConfig& c, std::size_t n, std::size_t trial) {
    const CoefficientVector truth = sweep_truth(c, c.truncation);
    const CoefficientVector qoi = qoi_coefficients(c.qoi, c.truncation);
    const Eigen::MatrixXd inputs =
        sample_inputs(training_spectrum(c, c.truncation), c.law, n, cell_seed(c.seed, n, trial));
    return cell_risk(c, truth, qoi, inputs);
}

void summarize(SweepResult& result) {
    std::sort(result.records.begin(), result.records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return a.n != b.n ? a.n < b.n : a.trial < b.trial;
    });
    result.nGrid.clear();
    result.medians.clear();
    for (std::size_t i = 0; i < result.records.size();) {
        std::size_t k = i;
        std::vector<double> risks;
        while (k < result.records.size() && result.records[k].n == result.records[i].n) risks.push_back(result.records[k++].risk);
        result.nGrid.push_back(result.records[i].n);
        result.medians.push_back(median(risks));
        i = k;
    }
    result.fit = LinearFit{};
    if (result.nGrid.size() < 2) {
        result.fit.slope = std::nan("");
        return;
    }
    // Upper half of the grid, at least two points.
    result.fitFrom = result.nGrid.size() >= 4 ? result.nGrid.size() / 2 : 0;
    std::vector<double> x, y;
    for (std::size_t i = result.fitFrom; i < result.nGrid.size(); ++i) {
        const double n = static_cast<double>(result.nGrid[i]);
        double value = result.medians[i];
        if (result.theory.logFactor) value /= std::log(2.0 * n);
        x.push_back(n);
        y.push_back(value);
    }
    result.fit = fit_loglog(x, y);
}

SweepResult run_sweep(const SweepConfig& c) {
    c.validate();
    SweepResult result;
    result.experiment = c.experiment;
    result.kind = c.kind;
    result.theory = sweep_theory(c);
    result.tolerance = c.tolerance;

    const CoefficientVector truth = sweep_truth(c, c.truncation);
    const CoefficientVector qoi = qoi_coefficients(c.qoi, c.truncation);
    const Spectrum train = training_spectrum(c, c.truncation);
    const std::size_t cells = c.nGrid.size() * c.trials;
    result.records.resize(cells);
    parallel_for(cells, c.threads, [&](std::size_t cell) {
        const std::size_t n = c.nGrid[cell / c.trials];
        const std::size_t trial = cell % c.trials;
        const Eigen::MatrixXd inputs = sample_inputs(train, c.law, n, cell_seed(c.seed, n, trial));
        result.records[cell] = {n, trial, cell_risk(c, truth, qoi, inputs)};
    });
    summarize(result);
    return result;
}

SweepResult run_ee_sweep(const SweepConfig& config) {
    require(config.kind == SweepKind::EndToEnd, "run_ee_sweep: config describes a full-field sweep");
    if (auto v = ee_violation(config.spec)) throw std::domain_error("inadmissible rate parameters: " + *v);
    return run_sweep(config);
}

SweepResult run_ff_sweep(const SweepConfig& config) {
    require(config.kind == SweepKind::FullField, "run_ff_sweep: config describes an end-to-end sweep");
    RateSpec spec = config.spec;
    spec.r = config.qoi.decay_exponent();
    if (auto v = ff_powerlaw_violation(spec)) throw std::domain_error("inadmissible rate parameters: " + *v);
    return run_sweep(config);
}

TruncationCheck truncation_check(const SweepConfig& c) {
    c.validate();
    TruncationCheck check;
    check.n = c.nGrid.back();
    const std::size_t j = c.truncation;
    const std::size_t j2 = 2 * j;

    // The truth and QoI are fixed sequences; the J-model sees their first J coordinates.
    const CoefficientVector truth2 = sweep_truth(c, j);
    CoefficientVector truthLong;
    truthLong.label = truth2.label;
    if (c.kind == SweepKind::EndToEnd && c.truth == TruthKind::PowerLaw) {
        const double scale = truth2.coeffs[0];  // normalization constant c of c j^{-s-1/2-0.01}
        truthLong.coeffs.resize(static_cast<Eigen::Index>(j2));
        for (std::size_t k = 1; k <= j2; ++k)
            truthLong.coeffs[static_cast<Eigen::Index>(k - 1)] =
                scale * std::pow(static_cast<double>(k), -c.spec.s - 0.5 - kTruthNudge);
    } else {
        truthLong = sweep_truth(c, j2);
    }
    const CoefficientVector qLong = qoi_coefficients(c.qoi, j2);
    const Eigen::MatrixXd inputsLong =
        sample_inputs(training_spectrum(c, j2), c.law, check.n, cell_seed(c.seed, check.n, 0));

    CoefficientVector truthShort{truthLong.coeffs.head(static_cast<Eigen::Index>(j)), truthLong.label};
    CoefficientVector qShort{qLong.coeffs.head(static_cast<Eigen::Index>(j)), qLong.label};
    check.risk = cell_risk(c, truthShort, qShort, inputsLong.leftCols(static_cast<Eigen::Index>(j)));
    check.riskDoubled = cell_risk(c, truthLong, qLong, inputsLong);
    check.relativeChange = std::abs(check.riskDoubled - check.risk) / check.risk;
    return check;
}

bool ComparisonResult::ordering_matches() const {
    return ff_faster_empirically() == ff_faster_in_theory();
}

SweepConfig comparison_sweep(const ComparisonConfig& c, SweepKind kind) {
    SweepConfig s;
    s.kind = kind;
    std::ostringstream name;
    name << (kind == SweepKind::EndToEnd ? "compare_ee_r" : "compare_ff_r") << c.r;
    s.experiment = name.str();
    s.spec.alpha = c.alpha;
    s.spec.alphaPrime = c.alpha;
    s.spec.beta = c.beta;
    s.spec.r = c.r;
    s.spec.s = c.beta + c.r + 0.5;
    s.spec.p = c.beta + c.r + 1.0;
    s.spec.gammaSq = 1.0;
    s.nGrid = c.nGrid;
    s.truncation = c.truncation;
    s.trials = c.trials;
    s.seed = c.seed;
    s.law = c.law;
    s.truth = TruthKind::Factorized;
    s.qoi = QoIDescriptor::synthetic(c.r);
    s.threads = c.threads;
    return s;
}

ComparisonResult run_comparison(const ComparisonConfig& c) {
    if (auto v = comparison_violation(c.alpha, c.beta, c.r))
        throw std::domain_error("inadmissible comparison: " + *v);
    ComparisonResult result;
    result.ee = run_ee_sweep(comparison_sweep(c, SweepKind::EndToEnd));
    result.ff = run_ff_sweep(comparison_sweep(c, SweepKind::FullField));
    const double ab = c.alpha + c.beta;
    result.rhoEE = rho_ee(ab, c.r);
    result.rhoFF = rho_ff(ab, c.r);
    std::vector<double> grid = c.rGrid;
    if (grid.empty())
        for (int i = 0; i <= 40; ++i) grid.push_back(-(0.5 + ab) + (0.5 + ab + 1.5) * i / 40.0);
    result.table = compare_exponents(ab, grid);
    return result;
}

}  // namespace ptolearn::harness
