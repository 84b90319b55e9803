#pragma once

// Fourier Neural Mappings: the four input/output variants, losses and exact gradients.
//
// Samples are matrices: a function on an n-point grid with d channels is n x d, and a
// finite-dimensional vector of length d is a single 1 x d row.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptolearn/fnm/layers.hpp"

namespace ptolearn::fnm {

enum class Variant { F2F, F2V, V2F, V2V };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);
bool takes_function(Variant v);
bool returns_function(Variant v);

struct FnmConfig {
    Variant variant = Variant::F2F;
    int inputDim = 1;         // channels of the input function, or input vector length
    int outputDim = 1;        // channels of the output function, or output vector length
    int width = 8;            // channels of the hidden functions
    int modes = 4;            // retained frequencies k = 0..K
    int depth = 2;            // number of Fourier layers
    int latentDim = 8;        // vector-input variants: output of the affine lift
    int functionalDim = 8;    // vector-output variants: output of G
    bool auxiliary = true;    // vector-output variants: concatenate the W branch
    int auxiliaryDim = 4;
    bool finalIdentity = true;   // function-output variants: identity activation on the last Fourier layer
    Eigen::Index resolution = 64;  // grid for vector-input variants
};

struct FnmParameters {
    DenseParams lift;                  // S
    DecoderLayerParams decoder;        // D, vector-input variants
    std::vector<FourierLayerParams> layers;
    FunctionalLayerParams functional;  // G, vector-output variants
    AuxiliaryParams auxiliary;         // W, vector-output variants with the branch enabled
    DenseParams projection;            // Q

    /// Same shapes, all zeros.
    FnmParameters zeros_like() const;
};

/// Named flat view of one parameter array; complex blocks expose interleaved re/im pairs.
struct BlockView {
    std::string name;
    double* data = nullptr;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    bool complex = false;

    Eigen::Index size() const { return rows * cols * (complex ? 2 : 1); }
};

/// Blocks in a fixed order; empty arrays are skipped.
std::vector<BlockView> parameter_blocks(FnmParameters& params);
std::size_t parameter_count(const FnmParameters& params);

/// Complex blocks ~ CN(0, 1 / (d_in (2K + 1))) with Im P^{(0)} = 0, dense weights
/// Glorot-uniform, biases zero.
FnmParameters init_parameters(const FnmConfig& config, std::uint64_t seed);

/// Zero-initialized arrays with the shapes implied by the config.
FnmParameters zero_parameters(const FnmConfig& config);

Activation layer_activation(const FnmConfig& config, int layer);

enum class LossKind { Relative, Squared };

/// sqrt(sum r^2 / rows): the L^2 quadrature norm for grid functions, Euclidean for 1 x d vectors.
double sample_norm(const Eigen::MatrixXd& r);

/// (1/N) sum ||y - p|| / (||y|| + 1e-6)
double loss_relative(const std::vector<Eigen::MatrixXd>& predicted, const std::vector<Eigen::MatrixXd>& truth);
/// (1/N) sum ||y - p||^2
double loss_squared(const std::vector<Eigen::MatrixXd>& predicted, const std::vector<Eigen::MatrixXd>& truth);

class FnmModel {
public:
    FnmModel() = default;
    FnmModel(FnmConfig config, FnmParameters params);
    FnmModel(const FnmConfig& config, std::uint64_t seed);

    const FnmConfig& config() const { return config_; }
    const FnmParameters& parameters() const { return params_; }
    FnmParameters& parameters() { return params_; }

    /// resolution overrides the config grid for vector-input variants (0 keeps it).
    Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Eigen::Index resolution = 0) const;

    struct Trace;
    Eigen::MatrixXd forward_traced(const Eigen::MatrixXd& input, Eigen::Index resolution, Trace& trace) const;
    /// Accumulates parameter gradients for one sample.
    void backward(const Trace& trace, const Eigen::MatrixXd& gradOutput, FnmParameters& grad) const;

    /// Validates parameter shapes against the config.
    void validate() const;

private:
    FnmConfig config_;
    FnmParameters params_;
};

struct FnmModel::Trace {
    Eigen::MatrixXd input;
    Eigen::Index resolution = 0;
    Eigen::VectorXd latent;   // vector-input variants: S(input)
    Field lifted;             // first hidden function
    std::vector<FourierLayerCache> layers;
    Field last;               // output of the last Fourier layer
    ModeMatrix lastModes;     // vector-output variants
    AuxiliaryCache aux;
    Eigen::VectorXd head;     // vector-output variants: (G, W) concatenation
};

struct LossAndGradient {
    double loss = 0.0;
    FnmParameters gradient;
};

/// Mean loss over the batch and its exact gradient.
LossAndGradient model_gradient(const FnmModel& model, const std::vector<Eigen::MatrixXd>& inputs,
                               const std::vector<Eigen::MatrixXd>& targets, LossKind kind, Eigen::Index resolution = 0);

}  // namespace ptolearn::fnm
