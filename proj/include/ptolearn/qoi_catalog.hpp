#pragma once

// Linear quantities of interest on L^2(0, 1) expressed in the sine basis
// phi_j(x) = sqrt(2) sin(j pi x).

#include <cstddef>
#include <string>

#include "ptolearn/spectral_model.hpp"

namespace ptolearn {

enum class QoIKind { MeanOnInterval, PointEvaluation, DerivativePointEvaluation, SyntheticPowerLaw };

struct QoIDescriptor {
    QoIKind kind = QoIKind::MeanOnInterval;
    double x0 = 0.5;      // evaluation point for the point kinds
    double r = 0.5;       // decay exponent; fixed by the kind except for SyntheticPowerLaw
    double scale = 1.0;   // SyntheticPowerLaw only

    static QoIDescriptor mean_on_interval();
    static QoIDescriptor point_evaluation(double x0);
    static QoIDescriptor derivative_point_evaluation(double x0);
    static QoIDescriptor synthetic(double r, double scale = 1.0);

    double decay_exponent() const { return r; }
    std::string name() const;
};

CoefficientVector qoi_coefficients(const QoIDescriptor& descriptor, std::size_t truncation);

struct DecayFit {
    double fittedR = 0.0;
    double constant = 0.0;  // max_j j^{2r+1} q_j^2 for the stored r
};

/// Fits |q_j|^2 ~ j^{-2r-1} on maxima over dyadic blocks [2^k, 2^{k+1}).
DecayFit verify_decay(const QoIDescriptor& descriptor, std::size_t truncation);

}  // namespace ptolearn
