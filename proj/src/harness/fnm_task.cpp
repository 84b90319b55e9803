#include "ptolearn/harness/fnm_task.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "ptolearn/common.hpp"

namespace ptolearn::harness {

using fnm::Variant;

std::string to_string(FnmTask task) { return task == FnmTask::Synthetic ? "synthetic" : "identity"; }

FnmTask fnm_task_from_string(const std::string& name) {
    if (name == "synthetic") return FnmTask::Synthetic;
    if (name == "identity") return FnmTask::Identity;
    throw std::invalid_argument("unknown FNM task '" + name + "' (expected synthetic or identity)");
}

void FnmTaskConfig::validate() const {
    require(!variants.empty(), "FNM task: no variants selected");
    require(!nGrid.empty(), "FNM task: empty N grid");
    for (std::size_t i = 0; i < nGrid.size(); ++i) {
        require(nGrid[i] >= 1, "FNM task: training set size N must be at least 1");
        require(i == 0 || nGrid[i] > nGrid[i - 1], "FNM task: N grid must be strictly increasing");
    }
    require(!seeds.empty(), "FNM task: no seeds");
    require(testCount >= 1, "FNM task: test set must be nonempty");
    require(klTerms >= 1, "FNM task: need at least one KL term");
    require(filterWidth > 0.0, "FNM task: filter width must be positive");
    fnm::check_resolution(resolution, model.modes);
    require(klTerms < resolution / 2, "FNM task: KL terms must be resolved by the grid");
}

FnmTaskConfig default_fnm_task() {
    FnmTaskConfig c;
    c.model.width = 16;
    c.model.modes = 8;
    c.model.depth = 2;
    c.model.latentDim = 16;
    c.model.functionalDim = 16;
    c.model.auxiliaryDim = 8;
    c.model.resolution = c.resolution;
    c.optimizer.learningRate = 3e-3;
    c.optimizer.epochs = 50;
    c.optimizer.batchSize = 32;
    c.optimizer.halvingPeriod = 0;
    c.optimizer.loss = fnm::LossKind::Relative;
    return c;
}

FnmTaskConfig default_identity_task() {
    FnmTaskConfig c = default_fnm_task();
    c.task = FnmTask::Identity;
    c.variants = {Variant::F2F};
    c.nGrid = {256};
    c.optimizer.epochs = 100;
    c.optimizer.halvingPeriod = 25;
    return c;
}

SyntheticSample synthetic_sample(const FnmTaskConfig& c, const Eigen::RowVectorXd& z) {
    require(z.size() == 2 * c.klTerms, "synthetic_sample: expected " + std::to_string(2 * c.klTerms) + " coefficients");
    const Eigen::Index n = c.resolution;
    SyntheticSample s;
    s.coefficients = z;
    s.input.resize(n, 1);
    s.field.resize(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n);
        double u = 0.0, smooth = 0.0;
        for (int k = 1; k <= c.klTerms; ++k) {
            const double amp = std::pow(static_cast<double>(k), -c.klDecay) * std::numbers::sqrt2;
            const double theta = 2.0 * std::numbers::pi * k * x;
            const double term = amp * (z[2 * (k - 1)] * std::cos(theta) + z[2 * (k - 1) + 1] * std::sin(theta));
            u += term;
            smooth += std::exp(-std::pow(k / c.filterWidth, 2.0)) * term;
        }
        s.input(i, 0) = u;
        s.field(i, 0) = c.task == FnmTask::Identity ? u : std::tanh(c.gain * smooth);
    }
    const double mean = s.field.mean();
    const double sd = std::sqrt((s.field.array() - mean).square().mean());
    s.moments.resize(1, 2);
    s.moments << mean, sd;
    return s;
}

std::vector<SyntheticSample> synthetic_dataset(const FnmTaskConfig& c, std::size_t count, std::uint64_t seed) {
    auto rng = make_rng(seed, kInputStream);
    const double half = std::sqrt(3.0);
    std::uniform_real_distribution<double> z(-half, half);
    std::vector<SyntheticSample> out;
    out.reserve(count);
    Eigen::RowVectorXd coeffs(2 * c.klTerms);
    for (std::size_t s = 0; s < count; ++s) {
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] = z(rng);
        out.push_back(synthetic_sample(c, coeffs));
    }
    return out;
}

fnm::TrainingData variant_data(const FnmTaskConfig& c, Variant v, const std::vector<SyntheticSample>& samples) {
    fnm::TrainingData d;
    d.resolution = c.resolution;
    for (const auto& s : samples) {
        d.inputs.push_back(fnm::takes_function(v) ? s.input : s.coefficients);
        d.targets.push_back(fnm::returns_function(v) ? s.field : s.moments);
    }
    return d;
}

fnm::FnmConfig variant_model(const FnmTaskConfig& c, Variant v) {
    fnm::FnmConfig m = c.model;
    m.variant = v;
    m.inputDim = fnm::takes_function(v) ? 1 : 2 * c.klTerms;
    m.outputDim = fnm::returns_function(v) ? 1 : 2;
    m.resolution = c.resolution;
    return m;
}

bool FnmTaskResult::monotone(Variant v) const {
    std::vector<double> seq;
    for (const auto& row : medians)
        if (row.variant == v) seq.push_back(row.medianTestError);
    if (seq.size() < 2) return false;
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (!(seq[i] < seq[i - 1])) return false;
    return true;
}

double FnmTaskResult::median(Variant v, std::size_t n) const {
    for (const auto& row : medians)
        if (row.variant == v && row.n == n) return row.medianTestError;
    throw std::out_of_range("no FNM result for " + fnm::to_string(v) + " at N=" + std::to_string(n));
}

FnmTaskResult run_fnm_synthetic(const FnmTaskConfig& c) {
    c.validate();
    const std::size_t nMax = c.nGrid.back();
    struct Job {
        Variant variant;
        std::size_t n;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (Variant v : c.variants)
        for (std::size_t n : c.nGrid)
            for (std::uint64_t seed : c.seeds) jobs.push_back({v, n, seed});

    // Nested training sets: N samples are the first N of one draw per seed; the test set is shared.
    std::vector<std::vector<SyntheticSample>> pools;
    for (std::uint64_t seed : c.seeds) pools.push_back(synthetic_dataset(c, nMax, stream_seed(seed, 101)));
    const std::vector<SyntheticSample> test = synthetic_dataset(c, c.testCount, stream_seed(0xC0FFEE, 202));

    FnmTaskResult result;
    result.task = c.task;
    result.records.resize(jobs.size());
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(
        c.threads > 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency()), jobs.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const Job& job = jobs[i];
                const std::size_t poolIndex =
                    static_cast<std::size_t>(std::find(c.seeds.begin(), c.seeds.end(), job.seed) - c.seeds.begin());
                const std::vector<SyntheticSample> train(pools[poolIndex].begin(),
                                                         pools[poolIndex].begin() + static_cast<std::ptrdiff_t>(job.n));
                fnm::FnmModel model(variant_model(c, job.variant), job.seed);
                fnm::OptimizerConfig opt = c.optimizer;
                opt.seed = job.seed;
                const auto report = fnm::train(model, variant_data(c, job.variant, train), opt);
                const double testError =
                    fnm::evaluate_loss(model, variant_data(c, job.variant, test), fnm::LossKind::Relative);
                result.records[i] = {job.variant, job.n, job.seed,
                                     report.lossHistory.empty() ? std::nan("") : report.lossHistory.back(), testError};
            } catch (...) {
                std::lock_guard lock(failureMutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (Variant v : c.variants)
        for (std::size_t n : c.nGrid) {
            std::vector<double> errs;
            for (const auto& r : result.records)
                if (r.variant == v && r.n == n) errs.push_back(r.testError);
            result.medians.push_back({v, n, ptolearn::median(errs)});
        }
    return result;
}

std::string fnm_table_csv(const FnmTaskResult& result) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "task,variant,N,seed,trainLoss,testError,medianTestError\n";
    for (const auto& r : result.records)
        out << to_string(result.task) << ',' << fnm::to_string(r.variant) << ',' << r.n << ',' << r.seed << ','
            << r.trainLoss << ',' << r.testError << ',' << result.median(r.variant, r.n) << '\n';
    return out.str();
}

}  // namespace ptolearn::harness
