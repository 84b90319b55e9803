#include "ptolearn/fnm/spectral.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "ptolearn/common.hpp"

namespace ptolearn::fnm {

namespace {

struct PlanPair {
    fftw_plan forward = nullptr;   // r2c
    fftw_plan backward = nullptr;  // c2r
};

// FFTW planning is not thread-safe; execution with new-array calls is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.backward);
        }
    }

    PlanPair get(int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<double> real(static_cast<std::size_t>(n));
        std::vector<fftw_complex> spec(static_cast<std::size_t>(n / 2 + 1));
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair p;
        p.forward = fftw_plan_dft_r2c_1d(n, real.data(), spec.data(), flags);
        p.backward = fftw_plan_dft_c2r_1d(n, spec.data(), real.data(), flags);
        plans_.emplace(n, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<int, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

void check_resolution(Eigen::Index n, int modes) {
    require(modes >= 0, "mode count must be nonnegative");
    require(is_power_of_two(n), "grid resolution must be a power of two, got " + std::to_string(n));
    require(n > 2 * static_cast<Eigen::Index>(modes),
            "grid resolution " + std::to_string(n) + " aliases " + std::to_string(modes) + " modes; need n > 2K");
}

ModeMatrix analysis(const Field& values, int modes) {
    const Eigen::Index n = values.rows();
    check_resolution(n, modes);
    const PlanPair plan = plan_cache().get(static_cast<int>(n));
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
    Eigen::VectorXd column(n);
    ModeMatrix result(modes + 1, values.cols());
    const double scale = 1.0 / static_cast<double>(n);
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        column = values.col(c);
        fftw_execute_dft_r2c(plan.forward, column.data(), reinterpret_cast<fftw_complex*>(out.data()));
        for (int k = 0; k <= modes; ++k) result(k, c) = out[static_cast<std::size_t>(k)] * scale;
    }
    return result;
}

Field synthesis(const ModeMatrix& coefficients, Eigen::Index resolution) {
    const int modes = static_cast<int>(coefficients.rows()) - 1;
    check_resolution(resolution, modes);
    const PlanPair plan = plan_cache().get(static_cast<int>(resolution));
    std::vector<std::complex<double>> in(static_cast<std::size_t>(resolution / 2 + 1));
    Field result(resolution, coefficients.cols());
    Eigen::VectorXd column(resolution);
    for (Eigen::Index c = 0; c < coefficients.cols(); ++c) {
        std::fill(in.begin(), in.end(), std::complex<double>(0.0, 0.0));
        // c2r reads only the real part of the k = 0 entry and doubles the rest implicitly
        for (int k = 0; k <= modes; ++k) in[static_cast<std::size_t>(k)] = coefficients(k, c);
        fftw_execute_dft_c2r(plan.backward, reinterpret_cast<fftw_complex*>(in.data()), column.data());
        result.col(c) = column;
    }
    return result;
}

ModeMatrix synthesis_adjoint(const Field& gradient, int modes) {
    ModeMatrix a = analysis(gradient, modes);
    const double n = static_cast<double>(gradient.rows());
    a.row(0) *= n;
    if (modes > 0) a.bottomRows(modes) *= 2.0 * n;
    return a;
}

Field analysis_adjoint(const ModeMatrix& gradient, Eigen::Index resolution) {
    ModeMatrix halved = gradient;
    if (halved.rows() > 1) halved.bottomRows(halved.rows() - 1) *= 0.5;
    return synthesis(halved, resolution) / static_cast<double>(resolution);
}

double evaluate_band_limited(const Eigen::VectorXcd& coefficients, double x) {
    double acc = coefficients[0].real();
    for (Eigen::Index k = 1; k < coefficients.size(); ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) * x;
        acc += 2.0 * (coefficients[k] * std::complex<double>(std::cos(theta), std::sin(theta))).real();
    }
    return acc;
}

}  // namespace ptolearn::fnm
