#pragma once

// Diagonal sequence-space model: eigenvalue spectra, Karhunen-Loeve input
// sampling and the end-to-end / full-field observation models.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ptolearn {

/// Truncated power-law eigenvalue sequence values[j-1] = scale * j^(-2 * halfExponent).
struct Spectrum {
    double halfExponent = 0.0;
    double scale = 1.0;
    Eigen::VectorXd values;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

Spectrum make_spectrum(double halfExponent, double scale, std::size_t truncation);

enum class CoefficientLabel { TruthF, QoiQ, OperatorL, Estimate };

/// Coefficients of an element of H in the shared eigenbasis.
struct CoefficientVector {
    Eigen::VectorXd coeffs;
    CoefficientLabel label = CoefficientLabel::Estimate;

    std::size_t size() const { return static_cast<std::size_t>(coeffs.size()); }

    /// sqrt(sum_j j^{2s} |v_j|^2), j counted from 1.
    double sobolev_norm(double s) const;
};

/// Law of the KL coefficients z_j: zero mean, unit variance, independent.
/// UniformUnit is Uniform[-sqrt(3), sqrt(3)].
enum class CoefficientLaw { GaussianUnit, UniformUnit };

/// N x J matrix with entry (n, j) = sqrt(sigma_j) * z_nj.
Eigen::MatrixXd sample_inputs(const Spectrum& spectrum, CoefficientLaw law, std::size_t count,
                              std::uint64_t seed);

struct E2EDataset {
    Eigen::MatrixXd inputs;     // N x J
    Eigen::VectorXd responses;  // y_n = <f, u_n> + gamma * xi_n
    double noiseLevel = 1.0;

    std::size_t count() const { return static_cast<std::size_t>(inputs.rows()); }
    std::size_t truncation() const { return static_cast<std::size_t>(inputs.cols()); }
};

struct FFDataset {
    Eigen::MatrixXd inputs;     // N x J
    Eigen::MatrixXd responses;  // Y_nj = l_j u_nj + eta_nj, unit noise

    std::size_t count() const { return static_cast<std::size_t>(inputs.rows()); }
    std::size_t truncation() const { return static_cast<std::size_t>(inputs.cols()); }
};

/// Noiseless responses S_N f, summed in ascending j.
Eigen::VectorXd apply_sampling_operator(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& f);

E2EDataset generate_e2e(const CoefficientVector& fTruth, Eigen::MatrixXd inputs, double gamma,
                        std::uint64_t seed);

FFDataset generate_ff(const CoefficientVector& lTruth, Eigen::MatrixXd inputs, std::uint64_t seed);

}  // namespace ptolearn
