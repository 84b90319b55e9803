#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ptolearn/fnm/model.hpp"

namespace ptolearn::fnm {

/// Adam with L2 weight decay folded into the gradient and a step-halving schedule.
struct OptimizerConfig {
    double learningRate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weightDecay = 0.0;
    int epochs = 100;
    int batchSize = 32;
    int halvingPeriod = 100;  // epochs between learning-rate halvings; 0 disables
    LossKind loss = LossKind::Relative;
    std::uint64_t seed = 0;   // shuffling stream
};

struct TrainingData {
    std::vector<Eigen::MatrixXd> inputs;
    std::vector<Eigen::MatrixXd> targets;
    Eigen::Index resolution = 0;  // grid for vector-input variants; 0 uses the model config
};

struct TrainingReport {
    std::vector<double> lossHistory;  // mean training loss per epoch
};

class TrainingDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

TrainingReport train(FnmModel& model, const TrainingData& data, const OptimizerConfig& optimizer);

/// Mean loss of the model over a dataset.
double evaluate_loss(const FnmModel& model, const TrainingData& data, LossKind kind);

}  // namespace ptolearn::fnm
