#pragma once

// Building blocks of Fourier Neural Mappings on the 1D torus: Fourier layers, the linear
// functional layer G (function -> vector), the decoder layer D (vector -> function) and
// the pointwise auxiliary branch W. Complex weight blocks are stored for k = 0..K only;
// negative frequencies are their conjugates, which keeps every output real.
//
// Every backward routine accumulates (+=) into the supplied gradient structure and
// returns the gradient with respect to the layer input.

#include <vector>

#include <Eigen/Dense>

#include "ptolearn/fnm/spectral.hpp"

namespace ptolearn::fnm {

enum class Activation { Gelu, Identity };

double gelu(double x);
double gelu_derivative(double x);
/// Standard normal CDF Phi(x); gelu(x) = x Phi(x).
double normal_cdf(double x);
/// gelu'(x) given a cached Phi(x).
double gelu_derivative_from_cdf(double x, double cdf);

/// Affine map applied to each row: out = in * W^T + 1 b^T. A vector is a single row.
struct DenseParams {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
};

using SpectralBlocks = std::vector<Eigen::MatrixXcd>;  // K + 1 blocks, index = frequency

struct FourierLayerParams {
    Eigen::MatrixXd weight;  // d_out x d_in, pointwise term
    Eigen::VectorXd bias;    // constant bias function
    SpectralBlocks blocks;   // d_out x d_in each
};

/// G: blocks are m x d.  D: blocks are d x m.
using FunctionalLayerParams = SpectralBlocks;
using DecoderLayerParams = SpectralBlocks;

/// W: h -> mean_i NN(h(x_i)) with NN(v) = W2 gelu(W1 v + b1) + b2.
struct AuxiliaryParams {
    DenseParams hidden;
    DenseParams output;
};

Field dense_forward(const DenseParams& p, const Field& input);
Field dense_backward(const DenseParams& p, const Field& input, const Field& gradOut, DenseParams& grad);

struct FourierLayerCache {
    Field input;
    ModeMatrix inputModes;
    Field preActivation;
    Field cdf;  // Phi(preActivation), GELU layers only
};

/// act(v W^T + K v + 1 b^T) with (K v)(x) = sum_{|k| <= K} P_k hat v_k e^{2 pi i k x}.
Field fourier_layer_forward(const FourierLayerParams& p, const Field& input, Activation act,
                            FourierLayerCache* cache = nullptr);
Field fourier_layer_backward(const FourierLayerParams& p, const FourierLayerCache& cache, Activation act,
                             const Field& gradOut, FourierLayerParams& grad);

/// (G h)_l = Re sum_{|k| <= K} sum_j P^{(k)}_{lj} <psi_k, h_j>.
Eigen::VectorXd functional_layer_forward(const FunctionalLayerParams& p, const Field& input);
Eigen::VectorXd functional_layer_from_modes(const FunctionalLayerParams& p, const ModeMatrix& inputModes);
Field functional_layer_backward(const FunctionalLayerParams& p, const ModeMatrix& inputModes,
                                Eigen::Index resolution, const Eigen::VectorXd& gradOut, FunctionalLayerParams& grad);

/// (D z)(x) = Re sum_{|k| <= K} (P^{(k)} z) psi_k(x) on a grid of the given resolution.
Field decoder_layer_forward(const DecoderLayerParams& p, const Eigen::VectorXd& z, Eigen::Index resolution);
Eigen::VectorXd decoder_layer_backward(const DecoderLayerParams& p, const Eigen::VectorXd& z, const Field& gradOut,
                                       DecoderLayerParams& grad);

struct AuxiliaryCache {
    Field input;
    Field hiddenPre;
    Field hiddenAct;
    Field hiddenCdf;
};

Eigen::VectorXd auxiliary_forward(const AuxiliaryParams& p, const Field& input, AuxiliaryCache* cache = nullptr);
Field auxiliary_backward(const AuxiliaryParams& p, const AuxiliaryCache& cache, const Eigen::VectorXd& gradOut,
                         AuxiliaryParams& grad);

}  // namespace ptolearn::fnm
