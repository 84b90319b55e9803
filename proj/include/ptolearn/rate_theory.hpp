#pragma once

// Theoretical convergence-rate exponents for end-to-end and full-field learning,
// plus series evaluations used to check the decay lemmas numerically.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptolearn/spectral_model.hpp"

namespace ptolearn {

struct RateSpec {
    double alpha = 1.0;       // training covariance decay
    double alphaPrime = 1.0;  // test covariance decay
    double s = 1.0;           // truth smoothness
    double p = 1.5;           // prior smoothness (end-to-end)
    double beta = 0.5;        // operator smoothness / prior variance decay (full-field)
    double r = 0.0;           // QoI coefficient decay
    double gammaSq = 1.0;
};

/// Exponent rho in eps_N^2 ~ N^{-rho}, optionally multiplied by log(2N).
struct RateResult {
    double exponent = 0.0;
    bool logFactor = false;
};

/// Each returns std::nullopt when admissible, otherwise the violated condition.
std::optional<std::string> ee_violation(const RateSpec& spec);
std::optional<std::string> ff_powerlaw_violation(const RateSpec& spec);
std::optional<std::string> ff_sobolev_violation(const RateSpec& spec);
std::optional<std::string> comparison_violation(double alpha, double beta, double r);

RateResult ee_rate_optimal(const RateSpec& spec);
RateResult ee_rate_general(const RateSpec& spec);
RateResult ff_rate_powerlaw(const RateSpec& spec);
RateResult ff_rate_sobolev(const RateSpec& spec);

struct ExponentRow {
    double r = 0.0;
    double rhoEE = 0.0;
    double rhoFF = 0.0;
    bool admissible = true;  // false for r <= r0
};

struct ExponentTable {
    double alphaPlusBeta = 0.0;
    double r0 = 0.0;    // rho_EE(r0) = rho_FF(r0) = 0
    double r1 = -0.5;   // equal-rate transition
    double rho1 = 0.0;  // (2a + 2b) / (1 + 2a + 2b)
    std::vector<ExponentRow> rows;
};

double rho_ee(double alphaPlusBeta, double r);
double rho_ff(double alphaPlusBeta, double r);
ExponentTable compare_exponents(double alphaPlusBeta, const std::vector<double>& rGrid);

struct SeriesBound {
    double sum = 0.0;
    double bound = 0.0;
};

/// sum_j j^{-t} xi_j^2 / (1 + N j^{-u})^v over the given coefficients, and the rate factor
/// N^{-min(v, (t + 2q)/u)} ||xi||_{H^q}^2.
SeriesBound series_oracle_sobolev(const CoefficientVector& xi, double t, double u, double v, double q, double n);

struct PowerSeries {
    double sum = 0.0;
    double ratePrediction = 0.0;  // min(v, (t - 1)/u)
    bool logFlag = false;         // (t - 1)/u == v
    std::size_t terms = 0;        // explicitly summed terms before the tail integral
    double tailError = 0.0;       // estimated absolute error of the tail correction
};

/// sum_{j >= 1} j^{-t} / (1 + N j^{-u})^v with a certified integral tail.
PowerSeries series_oracle_powerlaw(double t, double u, double v, double n);

struct EffectiveDimensionRow {
    double mu = 0.0;
    double trace = 0.0;
    std::size_t terms = 0;
    double tailError = 0.0;
};

/// tr(C_mu^{-1} C) = sum_j x_j / (x_j + mu) with x_j = j^{-2(alpha + p)}.
std::vector<EffectiveDimensionRow> effective_dimension(double alpha, double p, const std::vector<double>& muGrid);

/// Operator-norm relative residual of
///   (A + lam I)^{-1} = B_lam^{-1/2} (I - B_lam^{-1/2} (B - A) B_lam^{-1/2})^{-1} B_lam^{-1/2}
/// for symmetric positive-semidefinite A and B.
double regularized_inverse_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lambda);

}  // namespace ptolearn
