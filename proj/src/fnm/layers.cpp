#include "ptolearn/fnm/layers.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ptolearn/common.hpp"

namespace ptolearn::fnm {

namespace {

int modes_of(const SpectralBlocks& blocks) {
    require(!blocks.empty(), "spectral layer has no weight blocks");
    return static_cast<int>(blocks.size()) - 1;
}

void check_channels(Eigen::Index expected, Eigen::Index got, const char* where) {
    require(expected == got, std::string(where) + ": expected " + std::to_string(expected) + " channels, got " +
                                 std::to_string(got));
}

}  // namespace

double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu(double x) { return x * normal_cdf(x); }

double gelu_derivative_from_cdf(double x, double cdf) {
    return cdf + x * std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double gelu_derivative(double x) { return gelu_derivative_from_cdf(x, normal_cdf(x)); }

Field dense_forward(const DenseParams& p, const Field& input) {
    check_channels(p.weight.cols(), input.cols(), "dense layer");
    Field out = input * p.weight.transpose();
    out.rowwise() += p.bias.transpose();
    return out;
}

Field dense_backward(const DenseParams& p, const Field& input, const Field& gradOut, DenseParams& grad) {
    grad.weight.noalias() += gradOut.transpose() * input;
    grad.bias += gradOut.colwise().sum().transpose();
    return gradOut * p.weight;
}

Field fourier_layer_forward(const FourierLayerParams& p, const Field& input, Activation act, FourierLayerCache* cache) {
    const int modes = modes_of(p.blocks);
    check_channels(p.weight.cols(), input.cols(), "Fourier layer");
    const Eigen::Index n = input.rows();

    ModeMatrix inputModes = analysis(input, modes);
    ModeMatrix mixed(modes + 1, p.weight.rows());
    for (int k = 0; k <= modes; ++k) mixed.row(k) = (p.blocks[static_cast<std::size_t>(k)] * inputModes.row(k).transpose()).transpose();

    Field pre = input * p.weight.transpose() + synthesis(mixed, n);
    pre.rowwise() += p.bias.transpose();

    if (act == Activation::Identity) {
        if (cache) {
            cache->input = input;
            cache->inputModes = std::move(inputModes);
            cache->preActivation = pre;
        }
        return pre;
    }
    Field cdf = pre.unaryExpr([](double x) { return normal_cdf(x); });
    Field out = pre.cwiseProduct(cdf);
    if (cache) {
        cache->input = input;
        cache->inputModes = std::move(inputModes);
        cache->preActivation = std::move(pre);
        cache->cdf = std::move(cdf);
    }
    return out;
}

Field fourier_layer_backward(const FourierLayerParams& p, const FourierLayerCache& cache, Activation act,
                             const Field& gradOut, FourierLayerParams& grad) {
    const int modes = modes_of(p.blocks);
    const Eigen::Index n = cache.input.rows();
    const Field gradPre =
        act == Activation::Gelu
            ? Field(gradOut.cwiseProduct(cache.preActivation.binaryExpr(
                  cache.cdf, [](double x, double cdf) { return gelu_derivative_from_cdf(x, cdf); })))
            : gradOut;

    grad.weight.noalias() += gradPre.transpose() * cache.input;
    grad.bias += gradPre.colwise().sum().transpose();

    const ModeMatrix gradMixed = synthesis_adjoint(gradPre, modes);
    ModeMatrix gradModes(modes + 1, cache.input.cols());
    for (int k = 0; k <= modes; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Eigen::VectorXcd gz = gradMixed.row(k).transpose();
        grad.blocks[kk].noalias() += gz * cache.inputModes.row(k).conjugate();
        gradModes.row(k) = (p.blocks[kk].adjoint() * gz).transpose();
    }
    return gradPre * p.weight + analysis_adjoint(gradModes, n);
}

Eigen::VectorXd functional_layer_from_modes(const FunctionalLayerParams& p, const ModeMatrix& inputModes) {
    const int modes = modes_of(p);
    require(inputModes.rows() == modes + 1, "functional layer: mode count mismatch");
    check_channels(p[0].cols(), inputModes.cols(), "functional layer");
    Eigen::VectorXd out = (p[0] * inputModes.row(0).transpose()).real();
    for (int k = 1; k <= modes; ++k)
        out += 2.0 * (p[static_cast<std::size_t>(k)] * inputModes.row(k).transpose()).real();
    return out;
}

Eigen::VectorXd functional_layer_forward(const FunctionalLayerParams& p, const Field& input) {
    return functional_layer_from_modes(p, analysis(input, modes_of(p)));
}

Field functional_layer_backward(const FunctionalLayerParams& p, const ModeMatrix& inputModes, Eigen::Index resolution,
                                const Eigen::VectorXd& gradOut, FunctionalLayerParams& grad) {
    const int modes = modes_of(p);
    ModeMatrix gradModes(modes + 1, inputModes.cols());
    for (int k = 0; k <= modes; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Eigen::VectorXcd gz = (k == 0 ? 1.0 : 2.0) * gradOut.cast<std::complex<double>>();
        grad[kk].noalias() += gz * inputModes.row(k).conjugate();
        gradModes.row(k) = (p[kk].adjoint() * gz).transpose();
    }
    return analysis_adjoint(gradModes, resolution);
}

Field decoder_layer_forward(const DecoderLayerParams& p, const Eigen::VectorXd& z, Eigen::Index resolution) {
    const int modes = modes_of(p);
    check_channels(p[0].cols(), z.size(), "decoder layer");
    ModeMatrix coeffs(modes + 1, p[0].rows());
    const Eigen::VectorXcd zc = z.cast<std::complex<double>>();
    for (int k = 0; k <= modes; ++k) coeffs.row(k) = (p[static_cast<std::size_t>(k)] * zc).transpose();
    return synthesis(coeffs, resolution);
}

Eigen::VectorXd decoder_layer_backward(const DecoderLayerParams& p, const Eigen::VectorXd& z, const Field& gradOut,
                                       DecoderLayerParams& grad) {
    const int modes = modes_of(p);
    const ModeMatrix gradCoeffs = synthesis_adjoint(gradOut, modes);
    const Eigen::VectorXcd zc = z.cast<std::complex<double>>();
    Eigen::VectorXd gradZ = Eigen::VectorXd::Zero(z.size());
    for (int k = 0; k <= modes; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Eigen::VectorXcd ga = gradCoeffs.row(k).transpose();
        grad[kk].noalias() += ga * zc.transpose();
        gradZ += (p[kk].adjoint() * ga).real();
    }
    return gradZ;
}

Eigen::VectorXd auxiliary_forward(const AuxiliaryParams& p, const Field& input, AuxiliaryCache* cache) {
    Field pre = dense_forward(p.hidden, input);
    Field cdf = pre.unaryExpr([](double x) { return normal_cdf(x); });
    Field act = pre.cwiseProduct(cdf);
    const Eigen::VectorXd out = dense_forward(p.output, act).colwise().mean().transpose();
    if (cache) {
        cache->input = input;
        cache->hiddenPre = std::move(pre);
        cache->hiddenAct = std::move(act);
        cache->hiddenCdf = std::move(cdf);
    }
    return out;
}

Field auxiliary_backward(const AuxiliaryParams& p, const AuxiliaryCache& cache, const Eigen::VectorXd& gradOut,
                         AuxiliaryParams& grad) {
    const Eigen::Index n = cache.input.rows();
    const Field gradRows = (gradOut / static_cast<double>(n)).transpose().replicate(n, 1);
    const Field gradAct = dense_backward(p.output, cache.hiddenAct, gradRows, grad.output);
    const Field gradPre = gradAct.cwiseProduct(cache.hiddenPre.binaryExpr(
        cache.hiddenCdf, [](double x, double cdf) { return gelu_derivative_from_cdf(x, cdf); }));
    return dense_backward(p.hidden, cache.input, gradPre, grad.hidden);
}

}  // namespace ptolearn::fnm
