#pragma once

// Closed-form Gaussian posterior estimators for linear parameter-to-observable maps.

#include <cstddef>

#include <Eigen/Dense>

#include "ptolearn/spectral_model.hpp"

namespace ptolearn {

/// Factorized end-to-end posterior system for fixed inputs U, prior eigenvalues lambda and
/// noise level gamma. The posterior mean map is
///
///   A_N y = (1/N) L^{1/2} (C_hat + mu I)^{-1} L^{1/2} U^T y,   C_hat = L^{1/2} (U^T U / N) L^{1/2},
///
/// with mu = gamma^2 / N and L = diag(lambda). The primal form factors the J x J matrix
/// C_hat + mu I; the dual form factors the N x N matrix U L U^T + gamma^2 I, which gives the
/// same map by the push-through identity and is cheaper when N < J.
class E2ESolver {
public:
    enum class Form { Automatic, Primal, Dual };

    E2ESolver(Eigen::MatrixXd inputs, const Spectrum& prior, double gamma, Form form = Form::Automatic);

    Form form() const { return form_; }
    std::size_t count() const { return static_cast<std::size_t>(inputs_.rows()); }
    std::size_t truncation() const { return static_cast<std::size_t>(inputs_.cols()); }
    double gamma() const { return gamma_; }
    /// mu = gamma^2 / N
    double regularization() const;

    /// Posterior mean A_N y.
    Eigen::VectorXd mean(const Eigen::VectorXd& responses) const;

    /// A_N as a dense J x N matrix (its columns are A_N e_n).
    Eigen::MatrixXd estimator_matrix() const;

    /// gamma^2 * sum_n || W^{1/2} A_N e_n ||^2 for diagonal test weights W.
    double variance_columnwise(const Eigen::VectorXd& testWeights) const;

    /// Same trace through the J x J identity
    /// (gamma^2 / N) [ tr(D M^{-1} D) - mu ||M^{-1} D||_F^2 ],  D = (W L)^{1/2}, M = C_hat + mu I.
    /// Requires the primal form.
    double variance_spectral(const Eigen::VectorXd& testWeights) const;

    /// tr(W^{1/2} Lambda^{(N)} W^{1/2}).
    double spread(const Eigen::VectorXd& testWeights) const;

    /// Posterior covariance Lambda^{(N)} (J x J).
    Eigen::MatrixXd covariance() const;

private:
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd lambda_;
    Eigen::VectorXd sqrtLambda_;
    double gamma_;
    Form form_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

struct E2EPosterior {
    CoefficientVector mean;
    Eigen::MatrixXd covariance;  // Lambda^{(N)}, symmetric positive semidefinite
    double gamma = 1.0;
    Spectrum prior;
};

E2EPosterior e2e_posterior(const E2EDataset& data, const Spectrum& prior);

/// Coordinatewise conjugate posterior for the eigenvalues of a diagonal forward operator
/// under unit observation noise and prior l_j ~ N(0, mu_j).
struct FFPosterior {
    Eigen::VectorXd means;
    Eigen::VectorXd variances;
};

FFPosterior ff_posterior(const FFDataset& data, const Spectrum& prior);

/// Same posterior from the per-coordinate sufficient statistics
/// sum_n u_nj^2 and sum_n u_nj Y_nj.
FFPosterior ff_posterior_from_statistics(const Eigen::VectorXd& inputEnergy,
                                         const Eigen::VectorXd& crossMoment, const Spectrum& prior);

/// Coefficients of q o L_bar: entry j is q_j * l_bar_j.
CoefficientVector plugin_pto(const CoefficientVector& qoi, const FFPosterior& posterior);

}  // namespace ptolearn
