#include "ptolearn/rate_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "ptolearn/common.hpp"

namespace ptolearn {

namespace {

constexpr double kBoundaryTol = 1e-12;

bool on_boundary(double a, double b) { return std::abs(a - b) <= kBoundaryTol * std::max(1.0, std::abs(b)); }

void enforce(const std::optional<std::string>& violation) {
    if (violation) throw std::domain_error("inadmissible rate parameters: " + *violation);
}

/// Three-case rate with a split at `lhs` versus `rhs` and sub-parametric exponent `below`.
RateResult split_rate(double lhs, double rhs, double below) {
    if (on_boundary(lhs, rhs)) return {1.0, true};
    if (lhs < rhs) return {below, false};
    return {1.0, false};
}

struct CertifiedSum {
    double value = 0.0;
    std::size_t terms = 0;
    double tailError = 0.0;
};

/// sum_{j>=1} f(j): explicit terms up to J, then the integral of f over [J + 1/2, inf).
/// The midpoint rule makes the tail error about |f'(J + 1/2)| / 24; J doubles until that
/// falls below relTol times the total.
template <class F>
CertifiedSum certified_sum(F f, std::size_t initialTerms, double relTol) {
    constexpr std::size_t kMaxTerms = std::size_t{1} << 28;
    boost::math::quadrature::exp_sinh<double> integrator;
    double partial = 0.0, compensation = 0.0;  // Neumaier summation
    std::size_t j = 0;
    std::size_t target = std::max<std::size_t>(initialTerms, 16);
    for (;;) {
        for (; j < target; ++j) {
            const double term = f(static_cast<double>(j + 1));
            const double t = partial + term;
            compensation += std::abs(partial) >= std::abs(term) ? (partial - t) + term : (term - t) + partial;
            partial = t;
        }
        const double a = static_cast<double>(j) + 0.5;
        const double tail = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), 1e-13);
        const double h = 1e-3 * a;
        const double slope = (f(a + h) - f(a - h)) / (2.0 * h);
        CertifiedSum out{partial + compensation + tail, j, std::abs(slope) / 24.0};
        if (out.tailError <= relTol * std::abs(out.value) || target >= kMaxTerms) return out;
        target *= 2;
    }
}

}  // namespace

std::optional<std::string> ee_violation(const RateSpec& spec) {
    if (!(spec.alpha > 0.5)) return "training covariance exponent alpha must exceed 1/2";
    if (!(spec.alphaPrime >= 0.0)) return "test covariance exponent alpha' must be nonnegative";
    if (!(spec.s >= 0.0)) return "truth smoothness s must be nonnegative";
    if (!(spec.p > 0.5)) return "prior exponent p must exceed 1/2";
    if (!(spec.alpha + spec.s > 1.0)) return "truth regularity requires alpha + s > 1";
    if (!(spec.gammaSq > 0.0)) return "noise variance must be positive";
    return std::nullopt;
}

std::optional<std::string> ff_powerlaw_violation(const RateSpec& spec) {
    if (!(spec.alpha > 0.5)) return "training covariance exponent alpha must exceed 1/2";
    if (!(spec.alphaPrime >= 0.0)) return "test covariance exponent alpha' must be nonnegative";
    if (!(std::min(spec.alpha, spec.alphaPrime + spec.r + 0.5) + spec.beta > 0.0))
        return "full-field regularity requires min(alpha, alpha' + r + 1/2) + beta > 0";
    return std::nullopt;
}

std::optional<std::string> ff_sobolev_violation(const RateSpec& spec) {
    if (!(spec.alpha > 0.5)) return "training covariance exponent alpha must exceed 1/2";
    if (!(spec.alphaPrime >= 0.0)) return "test covariance exponent alpha' must be nonnegative";
    if (!(std::min(spec.alpha, spec.alphaPrime + spec.r) + spec.beta > 0.0))
        return "Sobolev QoI regularity requires min(alpha, alpha' + r) + beta > 0";
    return std::nullopt;
}

std::optional<std::string> comparison_violation(double alpha, double beta, double r) {
    if (!(beta + r + 0.5 > 0.0)) return "comparison requires beta + r + 1/2 > 0";
    if (!(alpha + beta + r > 0.5)) return "comparison requires alpha + beta + r > 1/2";
    if (!(alpha + beta > 0.0)) return "comparison requires alpha + beta > 0";
    return std::nullopt;
}

RateResult ee_rate_optimal(const RateSpec& spec) {
    enforce(ee_violation(spec));
    const double a = spec.alpha, ap = spec.alphaPrime, s = spec.s;
    return split_rate(ap, a + 0.5, (2.0 * ap + 2.0 * s) / (1.0 + 2.0 * a + 2.0 * s));
}

RateResult ee_rate_general(const RateSpec& spec) {
    enforce(ee_violation(spec));
    const double a = spec.alpha, ap = spec.alphaPrime, s = spec.s, p = spec.p;
    const double biasRate = (ap + s) / (a + p);
    if (on_boundary(ap, a + 0.5)) {
        // max(N^{-(a'+s)/(a+p)}, N^{-1} log 2N)
        if (biasRate >= 1.0) return {1.0, true};
        return {biasRate, false};
    }
    if (ap < a + 0.5) return {std::min(biasRate, 1.0 - (a + 0.5 - ap) / (a + p)), false};
    return {std::min(biasRate, 1.0), false};
}

RateResult ff_rate_powerlaw(const RateSpec& spec) {
    enforce(ff_powerlaw_violation(spec));
    const double a = spec.alpha, ap = spec.alphaPrime, b = spec.beta, r = spec.r;
    return split_rate(ap + r, a, (1.0 + 2.0 * ap + 2.0 * b + 2.0 * r) / (1.0 + 2.0 * a + 2.0 * b));
}

RateResult ff_rate_sobolev(const RateSpec& spec) {
    enforce(ff_sobolev_violation(spec));
    const double a = spec.alpha, ap = spec.alphaPrime, b = spec.beta, r = spec.r;
    return split_rate(ap + r, a + 0.5, (2.0 * ap + 2.0 * b + 2.0 * r) / (1.0 + 2.0 * a + 2.0 * b));
}

double rho_ee(double alphaPlusBeta, double r) { return 1.0 - 1.0 / (2.0 + 2.0 * alphaPlusBeta + 2.0 * r); }

double rho_ff(double alphaPlusBeta, double r) {
    return 1.0 - 2.0 * std::max(-r, 0.0) / (1.0 + 2.0 * alphaPlusBeta);
}

ExponentTable compare_exponents(double alphaPlusBeta, const std::vector<double>& rGrid) {
    require(alphaPlusBeta > 0.0, "compare_exponents: alpha + beta must be positive");
    ExponentTable table;
    table.alphaPlusBeta = alphaPlusBeta;
    table.r0 = -(1.0 + 2.0 * alphaPlusBeta) / 2.0;
    table.r1 = -0.5;
    table.rho1 = 2.0 * alphaPlusBeta / (1.0 + 2.0 * alphaPlusBeta);
    table.rows.reserve(rGrid.size());
    for (double r : rGrid) {
        ExponentRow row;
        row.r = r;
        row.admissible = r > table.r0;
        row.rhoEE = row.admissible ? rho_ee(alphaPlusBeta, r) : std::numeric_limits<double>::quiet_NaN();
        row.rhoFF = row.admissible ? rho_ff(alphaPlusBeta, r) : std::numeric_limits<double>::quiet_NaN();
        table.rows.push_back(row);
    }
    return table;
}

SeriesBound series_oracle_sobolev(const CoefficientVector& xi, double t, double u, double v, double q, double n) {
    require(t >= -2.0 * q, "series_oracle_sobolev: requires t >= -2q");
    require(u > 0.0, "series_oracle_sobolev: requires u > 0");
    require(v >= 0.0, "series_oracle_sobolev: requires v >= 0");
    require(n > 0.0, "series_oracle_sobolev: requires N > 0");
    SeriesBound out;
    double norm = 0.0;
    for (Eigen::Index k = 0; k < xi.coeffs.size(); ++k) {
        const double j = static_cast<double>(k + 1);
        const double x2 = xi.coeffs[k] * xi.coeffs[k];
        if (x2 == 0.0) continue;
        out.sum += std::pow(j, -t) * x2 / std::pow(1.0 + n * std::pow(j, -u), v);
        norm += std::pow(j, 2.0 * q) * x2;
    }
    out.bound = std::pow(n, -std::min(v, (t + 2.0 * q) / u)) * norm;
    return out;
}

PowerSeries series_oracle_powerlaw(double t, double u, double v, double n) {
    require(t > 1.0, "series_oracle_powerlaw: requires t > 1");
    require(u > 0.0, "series_oracle_powerlaw: requires u > 0");
    require(v >= 0.0, "series_oracle_powerlaw: requires v >= 0");
    require(n > 0.0, "series_oracle_powerlaw: requires N > 0");
    auto term = [=](double j) { return std::pow(j, -t) / std::pow(1.0 + n * std::pow(j, -u), v); };
    const auto start = static_cast<std::size_t>(std::ceil(64.0 * std::pow(n, 1.0 / u)));
    const CertifiedSum total = certified_sum(term, std::max<std::size_t>(start, 1024), 1e-8);

    PowerSeries out;
    out.sum = total.value;
    out.terms = total.terms;
    out.tailError = total.tailError;
    const double critical = (t - 1.0) / u;
    out.logFlag = on_boundary(critical, v);
    out.ratePrediction = std::min(v, critical);
    return out;
}

std::vector<EffectiveDimensionRow> effective_dimension(double alpha, double p, const std::vector<double>& muGrid) {
    require(alpha + p > 0.5, "effective_dimension: requires alpha + p > 1/2");
    const double decay = 2.0 * (alpha + p);
    std::vector<EffectiveDimensionRow> rows;
    rows.reserve(muGrid.size());
    for (double mu : muGrid) {
        require(mu > 0.0, "effective_dimension: regularization must be positive");
        // x / (x + mu) = 1 / (1 + mu j^{decay})
        auto term = [=](double j) { return 1.0 / (1.0 + mu * std::pow(j, decay)); };
        const auto start = static_cast<std::size_t>(std::ceil(64.0 * std::pow(mu, -1.0 / decay)));
        const CertifiedSum total = certified_sum(term, std::max<std::size_t>(start, 1024), 1e-8);
        rows.push_back({mu, total.value, total.terms, total.tailError});
    }
    return rows;
}

double regularized_inverse_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lambda) {
    require(a.rows() == a.cols() && b.rows() == b.cols() && a.rows() == b.rows(),
            "regularized_inverse_residual: A and B must be square of equal size");
    require(lambda > 0.0, "regularized_inverse_residual: lambda must be positive");
    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

    const Eigen::LLT<Eigen::MatrixXd> aReg(a + lambda * id);
    const Eigen::MatrixXd lhs = aReg.solve(id);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b + lambda * id);
    const Eigen::MatrixXd bInvSqrt =
        eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::MatrixXd middle = id - bInvSqrt * (b - a) * bInvSqrt;
    const Eigen::MatrixXd rhs = bInvSqrt * middle.partialPivLu().solve(bInvSqrt);

    const Eigen::JacobiSVD<Eigen::MatrixXd> diff(lhs - rhs);
    const Eigen::JacobiSVD<Eigen::MatrixXd> ref(lhs);
    return diff.singularValues()(0) / ref.singularValues()(0);
}

}  // namespace ptolearn
