#include "ptolearn/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ptolearn/common.hpp"

namespace ptolearn {

namespace {

void check_weights(const Eigen::VectorXd& weights, Eigen::Index truncation) {
    require(weights.size() == truncation, "dimension mismatch: test spectrum has " +
                                              std::to_string(weights.size()) + " values, expected " +
                                              std::to_string(truncation));
}

}  // namespace

E2ESolver::E2ESolver(Eigen::MatrixXd inputs, const Spectrum& prior, double gamma, Form form)
    : inputs_(std::move(inputs)), lambda_(prior.values), gamma_(gamma), form_(form) {
    require(inputs_.rows() >= 1 && inputs_.cols() >= 1, "E2ESolver: empty input matrix");
    require(static_cast<Eigen::Index>(prior.size()) == inputs_.cols(),
            "dimension mismatch: prior has " + std::to_string(prior.size()) +
                " eigenvalues, inputs have " + std::to_string(inputs_.cols()) + " columns");
    require(gamma >= 0.0 && std::isfinite(gamma), "E2ESolver: noise level must be nonnegative");

    sqrtLambda_ = lambda_.array().sqrt();
    const Eigen::Index n = inputs_.rows();
    const Eigen::Index j = inputs_.cols();
    if (form_ == Form::Automatic) form_ = n < j ? Form::Dual : Form::Primal;

    if (form_ == Form::Primal) {
        Eigen::MatrixXd system = Eigen::MatrixXd::Zero(j, j);
        system.selfadjointView<Eigen::Lower>().rankUpdate(inputs_.transpose(), 1.0 / static_cast<double>(n));
        // Diagonal scaling acts entrywise, so the lower triangle stays self-contained.
        system = sqrtLambda_.asDiagonal() * system * sqrtLambda_.asDiagonal();
        system.diagonal().array() += regularization();
        factor_.compute(system);
    } else {
        const Eigen::MatrixXd scaled = inputs_ * sqrtLambda_.asDiagonal();
        Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n, n);
        system.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
        system.diagonal().array() += gamma_ * gamma_;
        factor_.compute(system);
    }
    if (factor_.info() != Eigen::Success)
        throw std::domain_error("E2ESolver: posterior system is singular (zero noise with rank-deficient inputs)");
}

double E2ESolver::regularization() const {
    return gamma_ * gamma_ / static_cast<double>(inputs_.rows());
}

Eigen::VectorXd E2ESolver::mean(const Eigen::VectorXd& responses) const {
    require(responses.size() == inputs_.rows(), "dimension mismatch: " + std::to_string(responses.size()) +
                                                    " responses for " + std::to_string(inputs_.rows()) +
                                                    " inputs");
    if (form_ == Form::Primal) {
        Eigen::VectorXd rhs = sqrtLambda_.cwiseProduct(inputs_.transpose() * responses);
        rhs /= static_cast<double>(inputs_.rows());
        return sqrtLambda_.cwiseProduct(factor_.solve(rhs));
    }
    const Eigen::VectorXd weights = factor_.solve(responses);
    return lambda_.cwiseProduct(inputs_.transpose() * weights);
}

Eigen::MatrixXd E2ESolver::estimator_matrix() const {
    if (form_ == Form::Primal) {
        Eigen::MatrixXd rhs = sqrtLambda_.asDiagonal() * inputs_.transpose();
        rhs /= static_cast<double>(inputs_.rows());
        return sqrtLambda_.asDiagonal() * factor_.solve(rhs);
    }
    const Eigen::MatrixXd rhs = inputs_ * lambda_.asDiagonal();
    return factor_.solve(rhs).transpose();
}

double E2ESolver::variance_columnwise(const Eigen::VectorXd& testWeights) const {
    check_weights(testWeights, inputs_.cols());
    if (gamma_ == 0.0) return 0.0;
    const Eigen::MatrixXd weighted = testWeights.cwiseSqrt().asDiagonal() * estimator_matrix();
    return gamma_ * gamma_ * weighted.squaredNorm();
}

double E2ESolver::variance_spectral(const Eigen::VectorXd& testWeights) const {
    check_weights(testWeights, inputs_.cols());
    if (form_ != Form::Primal) throw std::logic_error("variance_spectral requires the primal factorization");
    if (gamma_ == 0.0) return 0.0;
    const Eigen::Index j = inputs_.cols();
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(j, j);
    z.diagonal() = testWeights.cwiseProduct(lambda_).cwiseSqrt();
    factor_.matrixL().solveInPlace(z);
    const double traceInverse = z.squaredNorm();
    factor_.matrixU().solveInPlace(z);
    const double traceSquared = z.squaredNorm();
    const double mu = regularization();
    return gamma_ * gamma_ / static_cast<double>(inputs_.rows()) * (traceInverse - mu * traceSquared);
}

double E2ESolver::spread(const Eigen::VectorXd& testWeights) const {
    check_weights(testWeights, inputs_.cols());
    const Eigen::Index j = inputs_.cols();
    if (form_ == Form::Primal) {
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(j, j);
        z.diagonal() = testWeights.cwiseProduct(lambda_).cwiseSqrt();
        factor_.matrixL().solveInPlace(z);
        return regularization() * z.squaredNorm();
    }
    // Woodbury: Lambda^{(N)} = Lambda - Lambda U^T G^{-1} U Lambda
    Eigen::MatrixXd z = inputs_ * (lambda_.cwiseProduct(testWeights.cwiseSqrt())).asDiagonal();
    factor_.matrixL().solveInPlace(z);
    return testWeights.dot(lambda_) - z.squaredNorm();
}

Eigen::MatrixXd E2ESolver::covariance() const {
    const Eigen::Index j = inputs_.cols();
    Eigen::MatrixXd cov;
    if (form_ == Form::Primal) {
        cov = factor_.solve(Eigen::MatrixXd::Identity(j, j));
        cov = regularization() * (sqrtLambda_.asDiagonal() * cov * sqrtLambda_.asDiagonal());
    } else {
        Eigen::MatrixXd z = inputs_ * lambda_.asDiagonal();
        factor_.matrixL().solveInPlace(z);
        cov = -z.transpose() * z;
        cov.diagonal() += lambda_;
    }
    return 0.5 * (cov + cov.transpose());
}

E2EPosterior e2e_posterior(const E2EDataset& data, const Spectrum& prior) {
    require(data.noiseLevel > 0.0, "e2e_posterior: noise level must be positive");
    E2ESolver solver(data.inputs, prior, data.noiseLevel);
    E2EPosterior posterior;
    posterior.mean.coeffs = solver.mean(data.responses);
    posterior.mean.label = CoefficientLabel::Estimate;
    posterior.covariance = solver.covariance();
    posterior.gamma = data.noiseLevel;
    posterior.prior = prior;
    return posterior;
}

FFPosterior ff_posterior_from_statistics(const Eigen::VectorXd& inputEnergy,
                                         const Eigen::VectorXd& crossMoment, const Spectrum& prior) {
    require(inputEnergy.size() == crossMoment.size(), "ff_posterior: statistic lengths differ");
    require(static_cast<Eigen::Index>(prior.size()) == inputEnergy.size(),
            "dimension mismatch: prior has " + std::to_string(prior.size()) + " variances, data have " +
                std::to_string(inputEnergy.size()) + " coordinates");
    FFPosterior posterior;
    posterior.means.resize(inputEnergy.size());
    posterior.variances.resize(inputEnergy.size());
    for (Eigen::Index j = 0; j < inputEnergy.size(); ++j) {
        const double mu = prior.values[j];
        const double denom = 1.0 + mu * inputEnergy[j];
        posterior.means[j] = mu * crossMoment[j] / denom;
        posterior.variances[j] = mu / denom;
    }
    return posterior;
}

FFPosterior ff_posterior(const FFDataset& data, const Spectrum& prior) {
    require(data.inputs.rows() == data.responses.rows() && data.inputs.cols() == data.responses.cols(),
            "dimension mismatch: inputs and responses differ in shape");
    const Eigen::VectorXd energy = data.inputs.colwise().squaredNorm().transpose();
    const Eigen::VectorXd cross = data.inputs.cwiseProduct(data.responses).colwise().sum().transpose();
    return ff_posterior_from_statistics(energy, cross, prior);
}

CoefficientVector plugin_pto(const CoefficientVector& qoi, const FFPosterior& posterior) {
    require(qoi.coeffs.size() == posterior.means.size(),
            "dimension mismatch: QoI has " + std::to_string(qoi.coeffs.size()) +
                " coefficients, posterior has " + std::to_string(posterior.means.size()));
    return {qoi.coeffs.cwiseProduct(posterior.means), CoefficientLabel::Estimate};
}

}  // namespace ptolearn
