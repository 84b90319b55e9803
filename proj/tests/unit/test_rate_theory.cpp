#include <cmath>
#include <random>

#include "doctest.h"
#include "ptolearn/common.hpp"
#include "ptolearn/rate_theory.hpp"

using namespace ptolearn;

namespace {

RateSpec spec_of(double alpha, double alphaPrime, double s, double p) {
    RateSpec spec;
    spec.alpha = alpha;
    spec.alphaPrime = alphaPrime;
    spec.s = s;
    spec.p = p;
    return spec;
}

RateSpec ff_spec(double alpha, double alphaPrime, double beta, double r) {
    RateSpec spec;
    spec.alpha = alpha;
    spec.alphaPrime = alphaPrime;
    spec.beta = beta;
    spec.r = r;
    return spec;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) { return fit_loglog(x, y).slope; }

}  // namespace

TEST_CASE("optimal end-to-end exponents in all three regimes") {
    const RateResult a = ee_rate_optimal(spec_of(1.0, 1.0, 1.0, 1.5));
    CHECK(a.exponent == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_FALSE(a.logFactor);

    const RateResult b = ee_rate_optimal(spec_of(1.0, 1.5, 1.0, 1.5));
    CHECK(b.exponent == 1.0);
    CHECK(b.logFactor);

    const RateResult c = ee_rate_optimal(spec_of(1.0, 2.0, 0.1, 0.6));
    CHECK(c.exponent == 1.0);
    CHECK_FALSE(c.logFactor);

    CHECK_THROWS_AS(ee_rate_optimal(spec_of(0.6, 1.0, 0.2, 1.0)), std::domain_error);
    CHECK_THROWS_AS(ee_rate_optimal(spec_of(1.0, 1.0, 1.0, 0.4)), std::domain_error);
}

TEST_CASE("general end-to-end exponent") {
    CHECK(ee_rate_general(spec_of(1.0, 1.0, 1.0, 1.5)).exponent == doctest::Approx(0.8).epsilon(1e-15));
    // min(1/2, 1 - 3/4) by hand
    const RateResult a = ee_rate_general(spec_of(1.0, 0.0, 1.0, 1.0));
    CHECK(a.exponent == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_FALSE(a.logFactor);

    // boundary: (a' + s)/(a + p) = 2.5/2.5 -> N^{-1} log 2N wins the max
    const RateResult b = ee_rate_general(spec_of(1.0, 1.5, 1.0, 1.5));
    CHECK(b.exponent == 1.0);
    CHECK(b.logFactor);
    // boundary with a rough prior: (1.5 + 0.5)/(1 + 2) < 1 dominates, no log
    const RateResult c = ee_rate_general(spec_of(1.0, 1.5, 0.5, 2.0));
    CHECK(c.exponent == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(c.logFactor);
}

TEST_CASE("general exponent reduces to the optimal one at p = s + 1/2") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int checked = 0;
    while (checked < 100) {
        RateSpec spec = spec_of(0.5 + 2.0 * unif(rng), 3.0 * unif(rng), 2.0 * unif(rng), 0.0);
        spec.p = spec.s + 0.5;
        if (ee_violation(spec)) continue;
        const RateResult opt = ee_rate_optimal(spec);
        const RateResult gen = ee_rate_general(spec);
        CHECK(gen.logFactor == opt.logFactor);
        // the two closed forms round differently; equal to a few ulps
        CHECK(std::abs(gen.exponent - opt.exponent) <= 4.0 * std::numeric_limits<double>::epsilon());
        ++checked;
    }
}

TEST_CASE("full-field exponents for power-law and Sobolev QoIs") {
    const RateSpec a = ff_spec(1.0, 1.0, 0.0, -0.25);
    CHECK(ff_rate_powerlaw(a).exponent == doctest::Approx(2.5 / 3.0).epsilon(1e-15));
    CHECK(ff_rate_sobolev(a).exponent == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(ff_rate_powerlaw(ff_spec(1.0, 1.0, 0.5, 0.5)).exponent == 1.0);
    CHECK_FALSE(ff_rate_powerlaw(ff_spec(1.0, 1.0, 0.5, 0.5)).logFactor);
    CHECK(ff_rate_powerlaw(ff_spec(1.0, 1.0, 0.5, 0.0)).logFactor);
    CHECK(ff_rate_powerlaw(ff_spec(1.0, 1.0, 0.5, -0.25)).exponent == doctest::Approx(0.875));

    CHECK(ff_rate_sobolev(ff_spec(1.0, 1.0, 0.5, 0.5)).logFactor);
    CHECK(ff_rate_sobolev(ff_spec(1.0, 1.0, 0.5, 0.75)).exponent == 1.0);
    CHECK_FALSE(ff_rate_sobolev(ff_spec(1.0, 1.0, 0.5, 0.75)).logFactor);

    CHECK_THROWS_AS(ff_rate_powerlaw(ff_spec(1.0, 0.0, -0.2, -0.5)), std::domain_error);
    CHECK_THROWS_AS(ff_rate_sobolev(ff_spec(1.0, 0.0, 0.1, -0.2)), std::domain_error);
}

TEST_CASE("power-law QoI exponent dominates the Sobolev one") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int checked = 0;
    while (checked < 500) {
        const RateSpec spec = ff_spec(0.5 + 2.0 * unif(rng), 2.0 * unif(rng), 2.0 * unif(rng) - 1.0, 3.0 * unif(rng) - 1.5);
        if (ff_powerlaw_violation(spec) || ff_sobolev_violation(spec)) continue;
        CHECK(ff_rate_powerlaw(spec).exponent >= ff_rate_sobolev(spec).exponent);
        ++checked;
    }
}

TEST_CASE("end-to-end and full-field exponent curves cross where expected") {
    const ExponentTable t = compare_exponents(1.0, {-0.5, 1.0, -0.9, -1.5, -2.0});
    CHECK(t.rows[0].rhoEE == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(t.rows[0].rhoEE - t.rows[0].rhoFF) <= 1e-12);
    CHECK(std::abs(t.rho1 - 2.0 / 3.0) <= 1e-12);
    CHECK(t.rows[1].rhoFF == 1.0);
    CHECK(t.rows[1].rhoEE < 1.0);
    CHECK(t.rows[2].rhoEE == doctest::Approx(1.0 - 1.0 / 2.2));
    CHECK(t.rows[2].rhoFF == doctest::Approx(0.4));
    CHECK(t.rows[2].rhoEE > t.rows[2].rhoFF);
    CHECK(t.r0 == -1.5);
    CHECK_FALSE(t.rows[3].admissible);
    CHECK_FALSE(t.rows[4].admissible);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.01, 4.0);
    for (int k = 0; k < 200; ++k) {
        const double ab = unif(rng);
        const double r0 = -(1.0 + 2.0 * ab) / 2.0;
        CHECK(std::abs(rho_ee(ab, -0.5) - rho_ff(ab, -0.5)) <= 1e-12);
        CHECK(std::abs(rho_ee(ab, r0)) <= 1e-12);
        CHECK(std::abs(rho_ff(ab, r0)) <= 1e-12);
        for (int i = 1; i < 400; ++i) {
            const double r = r0 + (3.0 - r0) * i / 400.0;
            if (std::abs(r + 0.5) < 1e-9) continue;
            if (r < -0.5)
                CHECK(rho_ee(ab, r) > rho_ff(ab, r));
            else
                CHECK(rho_ee(ab, r) < rho_ff(ab, r));
        }
    }
    CHECK_THROWS_AS(compare_exponents(0.0, {0.0}), std::invalid_argument);
    CHECK(comparison_violation(0.5, 0.5, -0.9).has_value());
    CHECK_FALSE(comparison_violation(1.0, 0.5, -0.9).has_value());
}

TEST_CASE("Sobolev series oracle") {
    const CoefficientVector zero{Eigen::VectorXd::Zero(100), CoefficientLabel::Estimate};
    CHECK(series_oracle_sobolev(zero, 2.0, 1.0, 1.0, 0.0, 10.0).sum == 0.0);

    CoefficientVector xi{Eigen::VectorXd(50), CoefficientLabel::Estimate};
    double plain = 0.0;
    for (Eigen::Index k = 0; k < 50; ++k) {
        xi.coeffs[k] = 1.0 / (k + 1.0);
        plain += std::pow(k + 1.0, -1.5) * xi.coeffs[k] * xi.coeffs[k];
    }
    CHECK(series_oracle_sobolev(xi, 1.5, 2.0, 0.0, 0.0, 1e3).sum == doctest::Approx(plain).epsilon(1e-13));
    CHECK(series_oracle_sobolev(xi, 1.5, 2.0, 0.0, 0.0, 7.0).sum == doctest::Approx(plain).epsilon(1e-13));

    CoefficientVector big{Eigen::VectorXd(1000000), CoefficientLabel::Estimate};
    for (Eigen::Index k = 0; k < big.coeffs.size(); ++k) big.coeffs[k] = 1.0 / (k + 1.0);
    std::vector<double> ns, sums;
    for (int e = 4; e <= 16; ++e) {
        ns.push_back(std::ldexp(1.0, e));
        sums.push_back(series_oracle_sobolev(big, 4.0, 2.0, 2.0, 0.0, ns.back()).sum);
    }
    CHECK(std::abs(fitted_slope(ns, sums) + 2.0) <= 0.1);
    CHECK_THROWS_AS(series_oracle_sobolev(xi, -1.0, 1.0, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("power-law series oracle recovers all three decay regimes") {
    std::vector<double> ns;
    for (int e = 6; e <= 16; ++e) ns.push_back(std::ldexp(1.0, e));
    auto sweep = [&](double t, double u, double v) {
        std::vector<double> sums;
        for (double n : ns) {
            const PowerSeries s = series_oracle_powerlaw(t, u, v, n);
            CHECK(s.tailError <= 1e-6 * s.sum);
            sums.push_back(s.sum);
        }
        return sums;
    };

    const auto slow = sweep(3.0, 2.0, 2.0);
    CHECK(std::abs(fitted_slope(ns, slow) + 1.0) <= 0.1);
    CHECK(series_oracle_powerlaw(3.0, 2.0, 2.0, 8.0).ratePrediction == 1.0);

    const auto fast = sweep(5.0, 1.0, 2.0);
    CHECK(std::abs(fitted_slope(ns, fast) + 2.0) <= 0.1);
    CHECK_FALSE(series_oracle_powerlaw(5.0, 1.0, 2.0, 8.0).logFlag);

    const auto boundary = sweep(3.0, 1.0, 2.0);
    CHECK(series_oracle_powerlaw(3.0, 1.0, 2.0, 8.0).logFlag);
    std::vector<double> scaled, logs, delogged;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        scaled.push_back(boundary[i] * ns[i] * ns[i]);
        logs.push_back(std::log(2.0 * ns[i]));
        delogged.push_back(boundary[i] / logs.back());
    }
    CHECK(fit_line(logs, scaled).rSquared > 0.99);
    CHECK(std::abs(fitted_slope(ns, delogged) + 2.0) <= 0.1);

    // v = 0 is the plain zeta-type sum
    CHECK(series_oracle_powerlaw(2.0, 1.0, 0.0, 100.0).sum == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-9));
    CHECK_THROWS_AS(series_oracle_powerlaw(1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("effective dimension scales like mu^{-1/(2(alpha+p))}") {
    const std::vector<double> mus{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    for (auto [alpha, p] : {std::pair{0.5, 0.5}, std::pair{1.0, 1.5}, std::pair{0.75, 0.75}}) {
        const auto rows = effective_dimension(alpha, p, mus);
        std::vector<double> traces;
        for (const auto& row : rows) {
            CHECK(row.tailError <= 1e-6 * row.trace);
            traces.push_back(row.trace);
        }
        CHECK(std::abs(fitted_slope(mus, traces) + 1.0 / (2.0 * (alpha + p))) <= 0.05);
    }
    CHECK(effective_dimension(1.0, 1.0, {1e12})[0].trace < 1e-11);
    CHECK_THROWS_AS(effective_dimension(0.2, 0.2, {1.0}), std::invalid_argument);
}

TEST_CASE("regularized inverse identity holds for random PSD pairs") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> lam(1e-3, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 31;
        Eigen::MatrixXd x(n, n), y(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                x(i, k) = z(rng);
                y(i, k) = z(rng);
            }
        // rank-deficient A exercises the semidefinite case
        const Eigen::MatrixXd a = x.leftCols(std::max(1, n / 2)) * x.leftCols(std::max(1, n / 2)).transpose();
        const Eigen::MatrixXd b = y * y.transpose();
        CHECK(regularized_inverse_residual(a, b, lam(rng)) <= 1e-8);
    }
}
