#include "ptolearn/qoi_catalog.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ptolearn/common.hpp"

namespace ptolearn {

QoIDescriptor QoIDescriptor::mean_on_interval() { return {QoIKind::MeanOnInterval, 0.5, 0.5, 1.0}; }

QoIDescriptor QoIDescriptor::point_evaluation(double x0) { return {QoIKind::PointEvaluation, x0, -0.5, 1.0}; }

QoIDescriptor QoIDescriptor::derivative_point_evaluation(double x0) {
    return {QoIKind::DerivativePointEvaluation, x0, -1.5, 1.0};
}

QoIDescriptor QoIDescriptor::synthetic(double r, double scale) { return {QoIKind::SyntheticPowerLaw, 0.5, r, scale}; }

std::string QoIDescriptor::name() const {
    switch (kind) {
        case QoIKind::MeanOnInterval: return "mean_on_interval";
        case QoIKind::PointEvaluation: return "point_evaluation";
        case QoIKind::DerivativePointEvaluation: return "derivative_point_evaluation";
        case QoIKind::SyntheticPowerLaw: return "synthetic_powerlaw";
    }
    return "unknown";
}

CoefficientVector qoi_coefficients(const QoIDescriptor& d, std::size_t truncation) {
    require(truncation >= 1, "qoi_coefficients: truncation must be at least 1");
    if (d.kind == QoIKind::PointEvaluation || d.kind == QoIKind::DerivativePointEvaluation)
        require(d.x0 > 0.0 && d.x0 < 1.0, "qoi_coefficients: evaluation point must lie in (0, 1)");

    constexpr double pi = std::numbers::pi;
    const double root2 = std::numbers::sqrt2;
    CoefficientVector q{Eigen::VectorXd(static_cast<Eigen::Index>(truncation)), CoefficientLabel::QoiQ};
    for (std::size_t k = 0; k < truncation; ++k) {
        const double j = static_cast<double>(k + 1);
        double value = 0.0;
        switch (d.kind) {
            case QoIKind::MeanOnInterval:
                // (1 - cos(j pi)) is exactly 0 or 2
                value = (k % 2 == 0) ? root2 * 2.0 / (j * pi) : 0.0;
                break;
            case QoIKind::PointEvaluation: value = root2 * std::sin(j * pi * d.x0); break;
            case QoIKind::DerivativePointEvaluation: value = root2 * j * pi * std::cos(j * pi * d.x0); break;
            case QoIKind::SyntheticPowerLaw: value = d.scale * std::pow(j, -d.r - 0.5); break;
        }
        q.coeffs[static_cast<Eigen::Index>(k)] = value;
    }
    return q;
}

DecayFit verify_decay(const QoIDescriptor& d, std::size_t truncation) {
    require(truncation >= 256, "verify_decay: truncation must be at least 256");
    const CoefficientVector q = qoi_coefficients(d, truncation);

    std::vector<double> where, peak;
    for (std::size_t lo = 1; 2 * lo - 1 <= truncation; lo *= 2) {
        double best = -1.0;
        std::size_t arg = lo;
        for (std::size_t j = lo; j < 2 * lo; ++j) {
            const double v = q.coeffs[static_cast<Eigen::Index>(j - 1)];
            if (v * v > best) {
                best = v * v;
                arg = j;
            }
        }
        if (best > 0.0) {
            where.push_back(static_cast<double>(arg));
            peak.push_back(best);
        }
    }
    require(where.size() >= 2, "verify_decay: coefficient sequence vanishes on too many blocks");

    DecayFit fit;
    fit.fittedR = -(fit_loglog(where, peak).slope + 1.0) / 2.0;
    for (std::size_t k = 0; k < truncation; ++k) {
        const double j = static_cast<double>(k + 1);
        const double v = q.coeffs[static_cast<Eigen::Index>(k)];
        fit.constant = std::max(fit.constant, std::pow(j, 2.0 * d.r + 1.0) * v * v);
    }
    return fit;
}

}  // namespace ptolearn
