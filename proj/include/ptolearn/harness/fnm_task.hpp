#pragma once

// Desk-scale synthetic analog of the advection-style experiment: a KL-expanded random input
// on the torus, an intermediate function obtained by a fixed spectral filter followed by a
// pointwise nonlinearity, and either that function (full-field) or its mean and standard
// deviation (end-to-end) as the target.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptolearn/fnm/model.hpp"
#include "ptolearn/fnm/train.hpp"

namespace ptolearn::harness {

enum class FnmTask { Synthetic, Identity };

std::string to_string(FnmTask task);
FnmTask fnm_task_from_string(const std::string& name);

struct FnmTaskConfig {
    FnmTask task = FnmTask::Synthetic;
    std::vector<fnm::Variant> variants{fnm::Variant::F2F, fnm::Variant::F2V, fnm::Variant::V2F, fnm::Variant::V2V};
    std::vector<std::size_t> nGrid{64, 256, 1024};
    std::vector<std::uint64_t> seeds{0, 1, 2};
    std::size_t testCount = 256;
    Eigen::Index resolution = 64;
    int klTerms = 4;          // input u = sum_{k <= klTerms} k^{-klDecay} (a_k sqrt2 cos + b_k sqrt2 sin)
    double klDecay = 1.0;
    double filterWidth = 3.0; // spectral filter exp(-(k / filterWidth)^2)
    double gain = 2.0;        // intermediate w = tanh(gain * S u)
    fnm::FnmConfig model;     // variant and input/output dimensions are set per run
    fnm::OptimizerConfig optimizer;
    unsigned threads = 0;

    void validate() const;
};

/// Default task: width 16, 8 modes, 2 Fourier layers; Adam at a constant lr 3e-3 for 50 epochs.
FnmTaskConfig default_fnm_task();
/// Identity task with F2F only at N = 256: 100 epochs, lr halved every 25.
FnmTaskConfig default_identity_task();

struct SyntheticSample {
    Eigen::MatrixXd coefficients;  // 1 x 2 klTerms, uniform unit-variance KL coefficients
    Eigen::MatrixXd input;         // n x 1 grid function
    Eigen::MatrixXd field;         // n x 1 target function
    Eigen::MatrixXd moments;       // 1 x 2: grid mean and standard deviation of the target
};

SyntheticSample synthetic_sample(const FnmTaskConfig& config, const Eigen::RowVectorXd& coefficients);
std::vector<SyntheticSample> synthetic_dataset(const FnmTaskConfig& config, std::size_t count, std::uint64_t seed);

/// Inputs and targets of a dataset arranged for one variant.
fnm::TrainingData variant_data(const FnmTaskConfig& config, fnm::Variant variant,
                               const std::vector<SyntheticSample>& samples);

/// Model config for a variant with the task's input/output dimensions.
fnm::FnmConfig variant_model(const FnmTaskConfig& config, fnm::Variant variant);

struct FnmRunRecord {
    fnm::Variant variant = fnm::Variant::F2F;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double trainLoss = 0.0;  // final-epoch training loss
    double testError = 0.0;  // mean relative test error
};

struct FnmMedianRow {
    fnm::Variant variant = fnm::Variant::F2F;
    std::size_t n = 0;
    double medianTestError = 0.0;
};

struct FnmTaskResult {
    FnmTask task = FnmTask::Synthetic;
    std::vector<FnmRunRecord> records;
    std::vector<FnmMedianRow> medians;

    /// Median test error strictly decreasing along the N grid for the variant.
    bool monotone(fnm::Variant variant) const;
    double median(fnm::Variant variant, std::size_t n) const;
};

FnmTaskResult run_fnm_synthetic(const FnmTaskConfig& config);

std::string fnm_table_csv(const FnmTaskResult& result);

}  // namespace ptolearn::harness
