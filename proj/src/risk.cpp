#include "ptolearn/risk.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ptolearn/common.hpp"

namespace ptolearn {

namespace {

constexpr Eigen::Index kColumnwiseLimit = 4096;

double weighted_error(const Eigen::VectorXd& weights, const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < truth.size(); ++j) {
        const double d = truth[j] - estimate[j];
        acc += weights[j] * d * d;
    }
    return acc;
}

void check_lengths(Eigen::Index expected, Eigen::Index got, const char* what) {
    require(expected == got, std::string("dimension mismatch: ") + what + " has " + std::to_string(got) +
                                 " entries, expected " + std::to_string(expected));
}

}  // namespace

RiskReport e2e_conditional_risk(const CoefficientVector& fTruth, const Eigen::MatrixXd& inputs, double gamma,
                                const Spectrum& prior, const Spectrum& testSpectrum, const RiskOptions& options) {
    const Eigen::Index j = inputs.cols();
    check_lengths(j, fTruth.coeffs.size(), "truth");
    check_lengths(j, testSpectrum.values.size(), "test spectrum");

    const E2ESolver solver(inputs, prior, gamma, options.form);
    const Eigen::VectorXd& weights = testSpectrum.values;

    RiskReport report;
    const Eigen::VectorXd noiseless = apply_sampling_operator(inputs, fTruth.coeffs);
    report.bias = weighted_error(weights, fTruth.coeffs, solver.mean(noiseless));

    VarianceRoute route = options.route;
    if (route == VarianceRoute::Automatic) {
        route = (inputs.rows() <= kColumnwiseLimit || solver.form() != E2ESolver::Form::Primal)
                    ? VarianceRoute::Columnwise
                    : VarianceRoute::Spectral;
    }
    report.variance = route == VarianceRoute::Columnwise ? solver.variance_columnwise(weights)
                                                         : solver.variance_spectral(weights);
    report.total = report.bias + report.variance;
    if (options.computeSpread) report.spread = solver.spread(weights);
    return report;
}

RiskReport ff_conditional_risk_from_energy(const CoefficientVector& lTruth, const CoefficientVector& qoi,
                                           const Eigen::VectorXd& inputEnergy, const Spectrum& prior,
                                           const Spectrum& testSpectrum) {
    const Eigen::Index j = inputEnergy.size();
    check_lengths(j, lTruth.coeffs.size(), "operator truth");
    check_lengths(j, qoi.coeffs.size(), "QoI");
    check_lengths(j, prior.values.size(), "prior");
    check_lengths(j, testSpectrum.values.size(), "test spectrum");

    RiskReport report;
    for (Eigen::Index k = 0; k < j; ++k) {
        const double mu = prior.values[k];
        const double energy = inputEnergy[k];
        const double denom = 1.0 + mu * energy;
        const double shrink = 1.0 - mu * energy / denom;  // 1 - rho_j
        const double weight = testSpectrum.values[k] * qoi.coeffs[k] * qoi.coeffs[k];
        const double l = lTruth.coeffs[k];
        report.bias += weight * shrink * shrink * l * l;
        report.variance += weight * mu * mu * energy / (denom * denom);
    }
    report.total = report.bias + report.variance;
    return report;
}

RiskReport ff_conditional_risk(const CoefficientVector& lTruth, const CoefficientVector& qoi,
                               const Eigen::MatrixXd& inputs, const Spectrum& prior, const Spectrum& testSpectrum) {
    const Eigen::VectorXd energy = inputs.colwise().squaredNorm().transpose();
    return ff_conditional_risk_from_energy(lTruth, qoi, energy, prior, testSpectrum);
}

McRiskResult mc_risk_check(const RiskProblem& problem, std::size_t noiseReplicates, std::uint64_t seed) {
    require(noiseReplicates >= 100, "mc_risk_check: at least 100 noise replicates are required, got " +
                                        std::to_string(noiseReplicates));
    const Eigen::MatrixXd& u = problem.inputs;
    const Eigen::VectorXd& weights = problem.testSpectrum.values;
    const Eigen::VectorXd& truth = problem.truth.coeffs;

    auto rng = make_rng(seed, kNoiseStream);
    std::normal_distribution<double> noise(0.0, 1.0);
    // Welford running moments; a constant stream (gamma = 0) keeps the mean exact.
    double mean = 0.0, m2 = 0.0;
    std::size_t seen = 0;
    auto accumulate = [&](double err) {
        ++seen;
        const double delta = err - mean;
        mean += delta / static_cast<double>(seen);
        m2 += delta * (err - mean);
    };
    McRiskResult result;

    if (problem.kind == RiskKind::EndToEnd) {
        result.analytic = e2e_conditional_risk(problem.truth, u, problem.gamma, problem.prior, problem.testSpectrum).total;
        const E2ESolver solver(u, problem.prior, problem.gamma);
        const Eigen::VectorXd noiseless = apply_sampling_operator(u, truth);
        Eigen::VectorXd y(noiseless.size());
        for (std::size_t rep = 0; rep < noiseReplicates; ++rep) {
            for (Eigen::Index n = 0; n < y.size(); ++n)
                y[n] = problem.gamma > 0.0 ? noiseless[n] + problem.gamma * noise(rng) : noiseless[n];
            const double err = weighted_error(weights, truth, solver.mean(y));
            accumulate(err);
        }
    } else {
        const Eigen::VectorXd& q = problem.qoi.coeffs;
        require(q.size() == truth.size(), "dimension mismatch: QoI and operator truth differ in length");
        result.analytic = ff_conditional_risk(problem.truth, problem.qoi, u, problem.prior, problem.testSpectrum).total;
        const Eigen::VectorXd energy = u.colwise().squaredNorm().transpose();
        Eigen::MatrixXd responses(u.rows(), u.cols());
        const Eigen::VectorXd pto = q.cwiseProduct(truth);
        for (std::size_t rep = 0; rep < noiseReplicates; ++rep) {
            for (Eigen::Index n = 0; n < u.rows(); ++n)
                for (Eigen::Index k = 0; k < u.cols(); ++k) responses(n, k) = truth[k] * u(n, k) + noise(rng);
            const Eigen::VectorXd cross = u.cwiseProduct(responses).colwise().sum().transpose();
            const FFPosterior post = ff_posterior_from_statistics(energy, cross, problem.prior);
            const double err = weighted_error(weights, pto, q.cwiseProduct(post.means));
            accumulate(err);
        }
    }

    const double reps = static_cast<double>(noiseReplicates);
    result.mcEstimate = mean;
    result.mcStdErr = std::sqrt(m2 / (reps - 1.0) / reps);
    return result;
}

}  // namespace ptolearn
