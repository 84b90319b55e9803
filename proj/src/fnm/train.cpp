#include "ptolearn/fnm/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ptolearn/common.hpp"

namespace ptolearn::fnm {

TrainingReport train(FnmModel& model, const TrainingData& data, const OptimizerConfig& opt) {
    require(!data.inputs.empty(), "train: dataset is empty");
    require(data.inputs.size() == data.targets.size(), "train: input and target counts differ");
    require(opt.epochs >= 0 && opt.batchSize >= 1, "train: epochs must be nonnegative and batch size positive");
    require(opt.learningRate > 0.0 && opt.halvingPeriod >= 0, "train: invalid learning-rate schedule");

    const std::size_t total = parameter_count(model.parameters());
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
    std::vector<std::size_t> order(data.inputs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_rng(opt.seed, kShuffleStream);

    TrainingReport report;
    std::vector<Eigen::MatrixXd> batchIn, batchOut;
    long step = 0;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        const double lr = opt.halvingPeriod > 0 ? opt.learningRate * std::ldexp(1.0, -(epoch / opt.halvingPeriod))
                                                : opt.learningRate;
        std::shuffle(order.begin(), order.end(), rng);
        double epochLoss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opt.batchSize)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(opt.batchSize));
            batchIn.clear();
            batchOut.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batchIn.push_back(data.inputs[order[i]]);
                batchOut.push_back(data.targets[order[i]]);
            }
            LossAndGradient lg = model_gradient(model, batchIn, batchOut, opt.loss, data.resolution);
            if (!std::isfinite(lg.loss)) {
                std::ostringstream msg;
                msg << "training diverged: loss is " << lg.loss << " at epoch " << epoch << ", batch starting at "
                    << start << " (learning rate " << lr << ")";
                throw TrainingDivergence(msg.str());
            }
            epochLoss += lg.loss * static_cast<double>(stop - start);

            ++step;
            const double correction1 = 1.0 - std::pow(opt.beta1, static_cast<double>(step));
            const double correction2 = 1.0 - std::pow(opt.beta2, static_cast<double>(step));
            auto params = parameter_blocks(model.parameters());
            auto grads = parameter_blocks(lg.gradient);
            Eigen::Index offset = 0;
            for (std::size_t b = 0; b < params.size(); ++b) {
                double* theta = params[b].data;
                const double* g = grads[b].data;
                for (Eigen::Index i = 0; i < params[b].size(); ++i, ++offset) {
                    const double gi = g[i] + opt.weightDecay * theta[i];
                    m[offset] = opt.beta1 * m[offset] + (1.0 - opt.beta1) * gi;
                    v[offset] = opt.beta2 * v[offset] + (1.0 - opt.beta2) * gi * gi;
                    theta[i] -= lr * (m[offset] / correction1) / (std::sqrt(v[offset] / correction2) + opt.epsilon);
                }
            }
        }
        report.lossHistory.push_back(epochLoss / static_cast<double>(order.size()));
    }
    return report;
}

double evaluate_loss(const FnmModel& model, const TrainingData& data, LossKind kind) {
    require(!data.inputs.empty(), "evaluate_loss: dataset is empty");
    std::vector<Eigen::MatrixXd> predicted;
    predicted.reserve(data.inputs.size());
    for (const auto& x : data.inputs) predicted.push_back(model.forward(x, data.resolution));
    return kind == LossKind::Relative ? loss_relative(predicted, data.targets) : loss_squared(predicted, data.targets);
}

}  // namespace ptolearn::fnm
