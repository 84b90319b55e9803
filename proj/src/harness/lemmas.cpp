#include "ptolearn/harness/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ptolearn/common.hpp"
#include "ptolearn/rate_theory.hpp"

namespace ptolearn::harness {

namespace {

LemmaCheck slope_check(std::string name, double value, double target, double tolerance) {
    LemmaCheck c{std::move(name), value, target, tolerance, false, false};
    c.passed = std::abs(value - target) <= tolerance;
    return c;
}

std::string label(const char* prefix, double a, double b, double c) {
    std::ostringstream out;
    out << prefix << '(' << a << ',' << b << ',' << c << ')';
    return out.str();
}

}  // namespace

std::vector<LemmaCheck> verify_lemmas(std::uint64_t seed) {
    std::vector<LemmaCheck> checks;

    std::vector<double> ns;
    for (int e = 6; e <= 16; ++e) ns.push_back(std::ldexp(1.0, e));
    struct Case { double t, u, v; };
    for (const Case c : {Case{3.0, 2.0, 2.0}, Case{5.0, 1.0, 2.0}, Case{3.0, 1.0, 2.0}}) {
        std::vector<double> sums;
        bool logCase = false;
        double rate = 0.0;
        for (double n : ns) {
            const PowerSeries s = series_oracle_powerlaw(c.t, c.u, c.v, n);
            logCase = s.logFlag;
            rate = s.ratePrediction;
            sums.push_back(logCase ? s.sum / std::log(2.0 * n) : s.sum);
        }
        checks.push_back(slope_check(label("series_powerlaw", c.t, c.u, c.v), fit_loglog(ns, sums).slope, -rate, 0.1));
    }

    const std::vector<double> mus{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    for (auto [alpha, p] : {std::pair{0.5, 0.5}, std::pair{1.0, 1.5}, std::pair{0.75, 0.75}}) {
        std::vector<double> traces;
        for (const auto& row : effective_dimension(alpha, p, mus)) traces.push_back(row.trace);
        std::ostringstream name;
        name << "effective_dimension(" << alpha << ',' << p << ')';
        checks.push_back(slope_check(name.str(), fit_loglog(mus, traces).slope, -1.0 / (2.0 * (alpha + p)), 0.05));
    }

    auto rng = make_rng(seed, kInputStream);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> lam(1e-3, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 31;
        const int rank = std::max(1, n / 2);
        Eigen::MatrixXd x(n, rank), y(n, n);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
        for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = z(rng);
        const Eigen::MatrixXd a = x * x.transpose();
        const Eigen::MatrixXd b = y * y.transpose();
        worst = std::max(worst, regularized_inverse_residual(a, b, lam(rng)));
    }
    LemmaCheck inverse{"regularized_inverse_residual", worst, 0.0, 1e-8, true, worst <= 1e-8};
    checks.push_back(inverse);
    return checks;
}

}  // namespace ptolearn::harness
