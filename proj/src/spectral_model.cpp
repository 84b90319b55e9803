#include "ptolearn/spectral_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ptolearn/common.hpp"

namespace ptolearn {

Spectrum make_spectrum(double halfExponent, double scale, std::size_t truncation) {
    require(scale > 0.0 && std::isfinite(scale), "make_spectrum: scale must be positive");
    require(truncation >= 1, "make_spectrum: truncation must be at least 1");
    require(std::isfinite(halfExponent), "make_spectrum: exponent must be finite");

    Spectrum spectrum;
    spectrum.halfExponent = halfExponent;
    spectrum.scale = scale;
    spectrum.values.resize(static_cast<Eigen::Index>(truncation));
    for (std::size_t j = 1; j <= truncation; ++j) {
        spectrum.values[static_cast<Eigen::Index>(j - 1)] =
            scale * std::pow(static_cast<double>(j), -2.0 * halfExponent);
    }
    return spectrum;
}

double CoefficientVector::sobolev_norm(double s) const {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        const double w = std::pow(static_cast<double>(j + 1), 2.0 * s);
        sum += w * coeffs[j] * coeffs[j];
    }
    return std::sqrt(sum);
}

Eigen::MatrixXd sample_inputs(const Spectrum& spectrum, CoefficientLaw law, std::size_t count,
                              std::uint64_t seed) {
    require(count >= 1, "sample_inputs: sample count must be at least 1");
    require(spectrum.size() >= 1, "sample_inputs: empty spectrum");

    const auto rows = static_cast<Eigen::Index>(count);
    const auto cols = static_cast<Eigen::Index>(spectrum.size());
    Eigen::MatrixXd inputs(rows, cols);
    const Eigen::ArrayXd root = spectrum.values.array().sqrt();

    auto rng = make_rng(seed, kInputStream);
    // Row-major fill order so that the first rows of a larger draw match a smaller one.
    if (law == CoefficientLaw::GaussianUnit) {
        std::normal_distribution<double> z(0.0, 1.0);
        for (Eigen::Index n = 0; n < rows; ++n)
            for (Eigen::Index j = 0; j < cols; ++j) inputs(n, j) = root[j] * z(rng);
    } else {
        const double half = std::sqrt(3.0);
        std::uniform_real_distribution<double> z(-half, half);
        for (Eigen::Index n = 0; n < rows; ++n)
            for (Eigen::Index j = 0; j < cols; ++j) inputs(n, j) = root[j] * z(rng);
    }
    return inputs;
}

Eigen::VectorXd apply_sampling_operator(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& f) {
    require(inputs.cols() == f.size(), "dimension mismatch: truth has " + std::to_string(f.size()) +
                                           " coefficients, inputs have " +
                                           std::to_string(inputs.cols()) + " columns");
    Eigen::VectorXd y(inputs.rows());
    for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < inputs.cols(); ++j) acc += f[j] * inputs(n, j);
        y[n] = acc;
    }
    return y;
}

E2EDataset generate_e2e(const CoefficientVector& fTruth, Eigen::MatrixXd inputs, double gamma,
                        std::uint64_t seed) {
    require(gamma >= 0.0 && std::isfinite(gamma), "generate_e2e: noise level must be nonnegative");
    E2EDataset data;
    data.responses = apply_sampling_operator(inputs, fTruth.coeffs);
    data.inputs = std::move(inputs);
    data.noiseLevel = gamma;
    if (gamma > 0.0) {
        auto rng = make_rng(seed, kNoiseStream);
        std::normal_distribution<double> xi(0.0, 1.0);
        for (Eigen::Index n = 0; n < data.responses.size(); ++n) data.responses[n] += gamma * xi(rng);
    }
    return data;
}

FFDataset generate_ff(const CoefficientVector& lTruth, Eigen::MatrixXd inputs, std::uint64_t seed) {
    require(inputs.cols() == lTruth.coeffs.size(),
            "dimension mismatch: operator has " + std::to_string(lTruth.coeffs.size()) +
                " eigenvalues, inputs have " + std::to_string(inputs.cols()) + " columns");
    FFDataset data;
    data.responses.resize(inputs.rows(), inputs.cols());
    auto rng = make_rng(seed, kNoiseStream);
    std::normal_distribution<double> eta(0.0, 1.0);
    for (Eigen::Index n = 0; n < inputs.rows(); ++n)
        for (Eigen::Index j = 0; j < inputs.cols(); ++j)
            data.responses(n, j) = lTruth.coeffs[j] * inputs(n, j) + eta(rng);
    data.inputs = std::move(inputs);
    return data;
}

}  // namespace ptolearn
