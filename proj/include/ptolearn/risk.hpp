#pragma once

// Noise-averaged out-of-distribution prediction risks and their Monte-Carlo validation.

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "ptolearn/estimators.hpp"
#include "ptolearn/spectral_model.hpp"

namespace ptolearn {

struct RiskReport {
    double total = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    std::optional<double> spread;
};

enum class VarianceRoute {
    Automatic,   // columnwise for N <= 4096, spectral identity beyond (when the primal form is active)
    Columnwise,
    Spectral,
};

struct RiskOptions {
    VarianceRoute route = VarianceRoute::Automatic;
    bool computeSpread = false;
    E2ESolver::Form form = E2ESolver::Form::Automatic;
};

/// E^{Y|U} || (Sigma')^{1/2} (f - f_bar) ||^2 for the end-to-end posterior mean.
RiskReport e2e_conditional_risk(const CoefficientVector& fTruth, const Eigen::MatrixXd& inputs, double gamma,
                                const Spectrum& prior, const Spectrum& testSpectrum,
                                const RiskOptions& options = {});

/// Risk of the plug-in estimator q o L_bar, with unit full-field noise.
RiskReport ff_conditional_risk(const CoefficientVector& lTruth, const CoefficientVector& qoi,
                               const Eigen::MatrixXd& inputs, const Spectrum& prior,
                               const Spectrum& testSpectrum);

/// Same quantity from the per-coordinate input energies sum_n u_nj^2.
RiskReport ff_conditional_risk_from_energy(const CoefficientVector& lTruth, const CoefficientVector& qoi,
                                           const Eigen::VectorXd& inputEnergy, const Spectrum& prior,
                                           const Spectrum& testSpectrum);

enum class RiskKind { EndToEnd, FullField };

struct RiskProblem {
    RiskKind kind = RiskKind::EndToEnd;
    CoefficientVector truth;  // f for EndToEnd, l for FullField
    CoefficientVector qoi;    // FullField only
    Eigen::MatrixXd inputs;
    double gamma = 1.0;       // EndToEnd only; FullField noise is unit
    Spectrum prior;
    Spectrum testSpectrum;
};

struct McRiskResult {
    double analytic = 0.0;
    double mcEstimate = 0.0;
    double mcStdErr = 0.0;
};

/// Averages the test-weighted squared error over fresh noise draws with the inputs held fixed.
McRiskResult mc_risk_check(const RiskProblem& problem, std::size_t noiseReplicates, std::uint64_t seed);

}  // namespace ptolearn
