#include <cmath>
#include <random>

#include "doctest.h"
#include "ptolearn/estimators.hpp"

using namespace ptolearn;

namespace {

struct Instance {
    Eigen::MatrixXd u;
    Eigen::VectorXd y;
    Spectrum prior;
    double gamma;
};

Instance random_instance(Eigen::Index n, Eigen::Index j, double gamma, std::uint64_t seed) {
    Instance in;
    in.prior = make_spectrum(0.75, 1.0, static_cast<std::size_t>(j));
    in.u = sample_inputs(make_spectrum(1.0, 1.0, static_cast<std::size_t>(j)), CoefficientLaw::GaussianUnit,
                         static_cast<std::size_t>(n), seed);
    std::mt19937_64 rng(seed + 1000);
    std::normal_distribution<double> z;
    in.y.resize(n);
    for (auto& v : in.y) v = z(rng);
    in.gamma = gamma;
    return in;
}

// Textbook Bayesian linear regression: mean (U^T U + g^2 L^{-1})^{-1} U^T y, covariance g^2 (...)^{-1}.
Eigen::MatrixXd textbook_precision(const Instance& in) {
    Eigen::MatrixXd h = in.u.transpose() * in.u;
    h.diagonal() += in.gamma * in.gamma * in.prior.values.cwiseInverse();
    return h;
}

}  // namespace

TEST_CASE("scalar end-to-end posterior mean halves the observation") {
    E2EDataset data{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Constant(1, 1.0), 1.0};
    const E2EPosterior post = e2e_posterior(data, make_spectrum(0.0, 1.0, 1));
    // lambda u y / (lambda u^2 + gamma^2)
    CHECK(post.mean.coeffs[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(post.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("posterior shrinks monotonically as the noise grows") {
    double previous = 1e300;
    for (double gamma : {0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
        E2EDataset data{Eigen::MatrixXd::Constant(1, 1, 1.3), Eigen::VectorXd::Constant(1, 0.7), gamma};
        const double m = std::abs(e2e_posterior(data, make_spectrum(0.0, 1.0, 1)).mean.coeffs[0]);
        CHECK(m < previous);
        previous = m;
    }
    CHECK(previous < 1e-4);
}

TEST_CASE("primal and dual factorizations agree with textbook linear regression") {
    for (auto [n, j] : {std::pair<Eigen::Index, Eigen::Index>{12, 30}, {40, 9}, {16, 16}}) {
        const Instance in = random_instance(n, j, 0.4, 3 + static_cast<std::uint64_t>(n));
        const Eigen::MatrixXd h = textbook_precision(in);
        const Eigen::VectorXd oracleMean = h.ldlt().solve(in.u.transpose() * in.y);
        const Eigen::MatrixXd oracleCov = in.gamma * in.gamma * h.inverse();

        for (auto form : {E2ESolver::Form::Primal, E2ESolver::Form::Dual}) {
            const E2ESolver solver(in.u, in.prior, in.gamma, form);
            CHECK((solver.mean(in.y) - oracleMean).norm() <= 1e-10 * oracleMean.norm());
            CHECK((solver.covariance() - oracleCov).norm() <= 1e-10 * oracleCov.norm());
            const Eigen::MatrixXd a = solver.estimator_matrix();
            CHECK((a * in.y - oracleMean).norm() <= 1e-10 * oracleMean.norm());
        }
        const E2ESolver automatic(in.u, in.prior, in.gamma);
        CHECK(automatic.form() == (n < j ? E2ESolver::Form::Dual : E2ESolver::Form::Primal));
    }
}

TEST_CASE("posterior mean solves the regularized normal equations") {
    const Instance in = random_instance(50, 24, 0.7, 21);
    E2EDataset data{in.u, in.y, in.gamma};
    const E2EPosterior post = e2e_posterior(data, in.prior);
    const double n = 50.0, mu = in.gamma * in.gamma / n;
    const Eigen::VectorXd sqrtL = in.prior.values.cwiseSqrt();
    const Eigen::MatrixXd chat = sqrtL.asDiagonal() * (in.u.transpose() * in.u / n) * sqrtL.asDiagonal();
    const Eigen::VectorXd rhs = sqrtL.cwiseProduct(in.u.transpose() * in.y) / n;
    const Eigen::VectorXd whitened = post.mean.coeffs.cwiseQuotient(sqrtL.cwiseMax(1e-300));
    const Eigen::VectorXd residual = chat * whitened + mu * whitened - rhs;
    CHECK(residual.norm() <= 1e-10 * rhs.norm());
}

TEST_CASE("posterior mean is linear in the responses and zero for zero data") {
    const Instance a = random_instance(30, 20, 0.5, 5);
    const Instance b = random_instance(30, 20, 0.5, 6);
    const E2ESolver solver(a.u, a.prior, a.gamma);
    const Eigen::VectorXd sum = solver.mean(a.y + b.y);
    const Eigen::VectorXd parts = solver.mean(a.y) + solver.mean(b.y);
    CHECK((sum - parts).norm() <= 1e-12 * sum.norm());
    CHECK(solver.mean(Eigen::VectorXd::Zero(30)).norm() == 0.0);

    E2EDataset zeroData{a.u, Eigen::VectorXd::Zero(30), a.gamma};
    E2EDataset data{a.u, a.y, a.gamma};
    CHECK(e2e_posterior(zeroData, a.prior).covariance == e2e_posterior(data, a.prior).covariance);
}

TEST_CASE("posterior covariance is symmetric positive semidefinite") {
    for (auto form : {E2ESolver::Form::Primal, E2ESolver::Form::Dual}) {
        const Instance in = random_instance(25, 40, 0.2, 8);
        const Eigen::MatrixXd cov = E2ESolver(in.u, in.prior, in.gamma, form).covariance();
        CHECK((cov - cov.transpose()).norm() <= 1e-12 * cov.norm());
        const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues().minCoeff();
        CHECK(smallest >= -1e-10 * cov.trace());
    }
}

TEST_CASE("posterior mean minimizes the Tikhonov objective") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Instance in = random_instance(30, 16, 0.6, 40 + seed);
        in.prior = make_spectrum(0.25, 1.0, 16);  // bounded away from zero
        const Eigen::VectorXd f = E2ESolver(in.u, in.prior, in.gamma).mean(in.y);
        const double n = 30.0, mu = in.gamma * in.gamma / n;
        // gradient of (1/N)||y - U f||^2 + mu ||L^{-1/2} f||^2
        const Eigen::VectorXd grad =
            -2.0 / n * in.u.transpose() * (in.y - in.u * f) + 2.0 * mu * f.cwiseQuotient(in.prior.values);
        CHECK(grad.norm() <= 1e-8);
    }
}

TEST_CASE("zero noise with rank-deficient inputs is rejected") {
    const Instance in = random_instance(3, 8, 0.0, 1);
    CHECK_THROWS_AS(E2ESolver(in.u, in.prior, 0.0, E2ESolver::Form::Primal), std::domain_error);
    E2EDataset data{in.u, in.y, 0.0};
    CHECK_THROWS_AS(e2e_posterior(data, in.prior), std::invalid_argument);
    CHECK_THROWS_AS(e2e_posterior({in.u, in.y, 1.0}, make_spectrum(1.0, 1.0, 7)), std::invalid_argument);
}

namespace {

// Conjugate posterior for one coordinate by brute-force integration of
// prior x likelihood on a uniform grid.
std::pair<double, double> grid_posterior(double mu, const std::vector<double>& u, const std::vector<double>& y) {
    const int points = 400001;
    const double lo = -40.0, hi = 40.0, h = (hi - lo) / (points - 1);
    std::vector<double> logw(points);
    double peak = -1e300;
    for (int i = 0; i < points; ++i) {
        const double l = lo + h * i;
        double lw = -0.5 * l * l / mu;
        for (std::size_t n = 0; n < u.size(); ++n) lw -= 0.5 * (y[n] - l * u[n]) * (y[n] - l * u[n]);
        logw[i] = lw;
        peak = std::max(peak, lw);
    }
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < points; ++i) {
        const double l = lo + h * i;
        const double w = std::exp(logw[i] - peak);
        z += w;
        m1 += w * l;
        m2 += w * l * l;
    }
    const double mean = m1 / z;
    return {mean, m2 / z - mean * mean};
}

}  // namespace

TEST_CASE("full-field posterior matches a density-grid conjugate oracle") {
    FFDataset one{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0)};
    const FFPosterior simple = ff_posterior(one, make_spectrum(0.0, 1.0, 1));
    CHECK(simple.means[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(simple.variances[0] == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> mus(0.2, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 5;
        const double mu = mus(rng);
        FFDataset data{Eigen::MatrixXd(n, 1), Eigen::MatrixXd(n, 1)};
        std::vector<double> u(n), y(n);
        for (int k = 0; k < n; ++k) {
            u[k] = data.inputs(k, 0) = z(rng);
            y[k] = data.responses(k, 0) = 1.5 * u[k] + z(rng);
        }
        const FFPosterior post = ff_posterior(data, make_spectrum(0.0, mu, 1));
        const auto [gm, gv] = grid_posterior(mu, u, y);
        CHECK(post.means[0] == doctest::Approx(gm).epsilon(1e-7));
        CHECK(post.variances[0] == doctest::Approx(gv).epsilon(1e-6));
    }
}

TEST_CASE("full-field posterior shrinks toward zero and never inflates prior variance") {
    FFDataset data{Eigen::MatrixXd::Zero(4, 3), Eigen::MatrixXd::Zero(4, 3)};
    data.inputs.col(1).setConstant(0.5);
    data.inputs.col(2) << 1.0, -2.0, 0.5, 3.0;
    data.responses << 0.3, 0.1, 0.9, -1.0, 0.2, -1.7, 2.0, 0.4, 0.4, 0.0, 0.6, 2.5;
    const Spectrum prior = make_spectrum(0.5, 2.0, 3);
    const FFPosterior post = ff_posterior(data, prior);

    CHECK(post.means[0] == 0.0);  // empty column returns the prior
    CHECK(post.variances[0] == prior.values[0]);
    for (Eigen::Index j = 1; j < 3; ++j) {
        const double energy = data.inputs.col(j).squaredNorm();
        const double cross = data.inputs.col(j).dot(data.responses.col(j));
        CHECK(post.variances[j] > 0.0);
        CHECK(post.variances[j] <= prior.values[j]);
        CHECK(std::abs(post.means[j]) < std::abs(cross / energy));
    }

    FFDataset flat{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0)};
    CHECK(ff_posterior(flat, make_spectrum(0.0, 1e12, 1)).means[0] == doctest::Approx(2.0).epsilon(1e-10));

    CHECK_THROWS_AS(ff_posterior(data, make_spectrum(0.5, 1.0, 4)), std::invalid_argument);
}

TEST_CASE("plug-in estimate multiplies QoI and operator coefficients") {
    FFPosterior post{Eigen::Vector3d(3.0, 5.0, 7.0), Eigen::Vector3d::Ones()};
    CoefficientVector e1{Eigen::Vector3d(1.0, 0.0, 0.0), CoefficientLabel::QoiQ};
    CHECK(plugin_pto(e1, post).coeffs == Eigen::Vector3d(3.0, 0.0, 0.0));

    FFPosterior zero{Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones()};
    CHECK(plugin_pto(e1, zero).coeffs.norm() == 0.0);

    FFPosterior ramp{Eigen::Vector3d(1.0, 2.0, 3.0), Eigen::Vector3d::Ones()};
    CoefficientVector harmonic{Eigen::Vector3d(1.0, 0.5, 1.0 / 3.0), CoefficientLabel::QoiQ};
    const Eigen::VectorXd est = plugin_pto(harmonic, ramp).coeffs;
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(est[j] == doctest::Approx(1.0));

    CoefficientVector shortQ{Eigen::Vector2d(1.0, 1.0), CoefficientLabel::QoiQ};
    CHECK_THROWS_AS(plugin_pto(shortQ, post), std::invalid_argument);
}
