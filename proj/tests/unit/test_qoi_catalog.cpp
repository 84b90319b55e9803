#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "doctest.h"
#include "ptolearn/qoi_catalog.hpp"

using namespace ptolearn;
using std::numbers::pi;

TEST_CASE("mean on an interval has 8/(j pi)^2 on odd modes") {
    const CoefficientVector q = qoi_coefficients(QoIDescriptor::mean_on_interval(), 64);
    CHECK(std::abs(q.coeffs[0] * q.coeffs[0] - 8.0 / (pi * pi)) <= 1e-12);
    CHECK(q.coeffs[1] == 0.0);
    for (Eigen::Index k = 0; k < 64; ++k) {
        const double j = k + 1.0;
        const double expected = (k % 2 == 0) ? 8.0 / (j * j * pi * pi) : 0.0;
        CHECK(q.coeffs[k] * q.coeffs[k] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("point evaluation coefficients are basis values at x0") {
    const CoefficientVector q = qoi_coefficients(QoIDescriptor::point_evaluation(0.5), 8);
    CHECK(std::abs(q.coeffs[1]) <= 1e-15);
    CHECK(q.coeffs[0] == doctest::Approx(std::sqrt(2.0)));

    // <phi_j, m_eps> against a narrow normalized bump at x0 tends to phi_j(x0)
    const double x0 = 0.3, eps = 1e-4;
    const CoefficientVector p = qoi_coefficients(QoIDescriptor::point_evaluation(x0), 5);
    for (int j = 1; j <= 5; ++j) {
        auto integrand = [&](double x) {
            const double t = (x - x0) / eps;
            const double bump = 0.75 * (1.0 - t * t) / eps;  // Epanechnikov kernel
            return std::sqrt(2.0) * std::sin(j * pi * x) * bump;
        };
        const double value = boost::math::quadrature::gauss<double, 30>::integrate(integrand, x0 - eps, x0 + eps);
        CHECK(value == doctest::Approx(p.coeffs[j - 1]).epsilon(1e-6));
    }

    const CoefficientVector d = qoi_coefficients(QoIDescriptor::derivative_point_evaluation(0.25), 4);
    CHECK(d.coeffs[0] == doctest::Approx(std::sqrt(2.0) * pi * std::cos(pi / 4)));
    CHECK_THROWS_AS(qoi_coefficients(QoIDescriptor::point_evaluation(0.0), 4), std::invalid_argument);
    CHECK_THROWS_AS(qoi_coefficients(QoIDescriptor::derivative_point_evaluation(1.2), 4), std::invalid_argument);
}

TEST_CASE("fitted decay exponents match the catalog") {
    const DecayFit mean = verify_decay(QoIDescriptor::mean_on_interval(), 1 << 14);
    CHECK(std::abs(mean.fittedR - 0.5) <= 0.1);
    CHECK(mean.constant == doctest::Approx(8.0 / (pi * pi)));

    const DecayFit point = verify_decay(QoIDescriptor::point_evaluation(0.5), 1 << 14);
    CHECK(std::abs(point.fittedR + 0.5) <= 0.15);
    const DecayFit irrational = verify_decay(QoIDescriptor::point_evaluation(1.0 / std::numbers::sqrt2), 1 << 14);
    CHECK(std::abs(irrational.fittedR + 0.5) <= 0.15);

    const DecayFit deriv = verify_decay(QoIDescriptor::derivative_point_evaluation(0.3), 1 << 14);
    CHECK(std::abs(deriv.fittedR + 1.5) <= 0.15);
    CHECK(std::isfinite(deriv.constant));

    const DecayFit syn = verify_decay(QoIDescriptor::synthetic(0.7, 2.0), 4096);
    CHECK(std::abs(syn.fittedR - 0.7) <= 0.05);
    CHECK(syn.constant == doctest::Approx(4.0));
    CHECK_THROWS_AS(verify_decay(QoIDescriptor::mean_on_interval(), 100), std::invalid_argument);
}

TEST_CASE("only QoIs with positive r have square-summable coefficients") {
    auto partial = [](const QoIDescriptor& d, std::size_t j) { return qoi_coefficients(d, j).coeffs.squaredNorm(); };
    const std::size_t small = 1 << 10, mid = 1 << 14, large = 1 << 18;

    const auto mean = QoIDescriptor::mean_on_interval();
    const double m0 = partial(mean, small), m1 = partial(mean, mid), m2 = partial(mean, large);
    CHECK(m2 - m1 < 0.1 * (m1 - m0) + 1e-12);  // increments shrink: converging
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-4));   // ||indicator||^2 on (0, 1)

    for (const auto& d : {QoIDescriptor::point_evaluation(0.3), QoIDescriptor::derivative_point_evaluation(0.3)}) {
        const double p0 = partial(d, small), p1 = partial(d, mid), p2 = partial(d, large);
        CHECK(p1 > 8.0 * p0);  // grows at least linearly in J
        CHECK(p2 > 8.0 * p1);
    }
}

TEST_CASE("mean-on-interval coefficients represent the integral functional") {
    using GL = boost::math::quadrature::gauss<double, 40>;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z;
    const CoefficientVector q = qoi_coefficients(QoIDescriptor::mean_on_interval(), 24);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd c(12);
        for (auto& v : c) v = z(rng);
        auto h = [&](double x) {
            double acc = 0.0;
            for (int m = 0; m < 12; ++m) acc += c[m] * std::sin((m + 1) * pi * x);
            return acc;
        };
        const double integral = GL::integrate(h, 0.0, 1.0);
        double series = 0.0;
        for (int j = 1; j <= 24; ++j) {
            auto product = [&](double x) { return std::sqrt(2.0) * std::sin(j * pi * x) * h(x); };
            series += q.coeffs[j - 1] * GL::integrate(product, 0.0, 1.0);
        }
        CHECK(std::abs(series - integral) <= 1e-8 * std::max(1.0, std::abs(integral)));
    }
}
