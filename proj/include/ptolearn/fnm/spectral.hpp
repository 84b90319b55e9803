#pragma once

// Truncated real Fourier transforms on the uniform periodic grid x_i = i / n.
// A function sampled on the grid is an n x d matrix (row i holds h(x_i)); its
// retained spectrum is a (K + 1) x d complex matrix holding k = 0..K.

#include <cstddef>

#include <Eigen/Dense>

namespace ptolearn::fnm {

using Field = Eigen::MatrixXd;
using ModeMatrix = Eigen::MatrixXcd;

bool is_power_of_two(Eigen::Index n);

/// Throws std::invalid_argument unless n is a power of two with n > 2K.
void check_resolution(Eigen::Index n, int modes);

/// hat h_k = (1/n) sum_i h(x_i) exp(-2 pi i k x_i), k = 0..K.
ModeMatrix analysis(const Field& values, int modes);

/// y(x_i) = Re sum_k c_k a_k exp(2 pi i k x_i), c_0 = 1 and c_k = 2 otherwise: the real
/// field whose conjugate-symmetric spectrum has a_k at k >= 0.
Field synthesis(const ModeMatrix& coefficients, Eigen::Index resolution);

/// Adjoints for real-valued losses; complex gradients are dL/dRe + i dL/dIm.
ModeMatrix synthesis_adjoint(const Field& gradient, int modes);
Field analysis_adjoint(const ModeMatrix& gradient, Eigen::Index resolution);

/// Band-limited trigonometric polynomial from its retained spectrum, evaluated at any x.
double evaluate_band_limited(const Eigen::VectorXcd& coefficients, double x);

}  // namespace ptolearn::fnm
