#include "ptolearn/fnm/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ptolearn/common.hpp"

namespace ptolearn::fnm {

namespace {

constexpr double kRelativeGuard = 1e-6;

DenseParams dense_zeros(int out, int in) {
    return {Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
}

SpectralBlocks blocks_zeros(int modes, int rows, int cols) {
    return SpectralBlocks(static_cast<std::size_t>(modes + 1), Eigen::MatrixXcd::Zero(rows, cols));
}

int head_dim(const FnmConfig& c) { return c.functionalDim + (c.auxiliary ? c.auxiliaryDim : 0); }

void glorot(DenseParams& p, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(p.weight.rows() + p.weight.cols()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index i = 0; i < p.weight.size(); ++i) p.weight.data()[i] = u(rng);
}

void glorot(Eigen::MatrixXd& w, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
}

void complex_gaussian(SpectralBlocks& blocks, Rng& rng) {
    const int modes = static_cast<int>(blocks.size()) - 1;
    const double dIn = static_cast<double>(blocks[0].cols());
    const double sd = std::sqrt(1.0 / (dIn * (2.0 * modes + 1.0)) / 2.0);
    std::normal_distribution<double> z(0.0, sd);
    for (std::size_t k = 0; k < blocks.size(); ++k)
        for (Eigen::Index i = 0; i < blocks[k].size(); ++i) {
            const double re = z(rng);
            const double im = z(rng);
            blocks[k].data()[i] = {re, k == 0 ? 0.0 : im};  // Im P^{(0)} never reaches a real output
        }
}

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (m.rows() != rows || m.cols() != cols)
        throw std::invalid_argument(what + ": expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                                    ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void require_blocks(const SpectralBlocks& b, int modes, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (static_cast<int>(b.size()) != modes + 1)
        throw std::invalid_argument(what + ": expected " + std::to_string(modes + 1) + " frequency blocks");
    for (const auto& m : b)
        if (m.rows() != rows || m.cols() != cols)
            throw std::invalid_argument(what + ": block shape mismatch");
}

template <class Params, class F>
void visit_blocks(Params& p, F&& f) {
    auto dense = [&](auto& d, const std::string& name) {
        f(name + ".weight", d.weight);
        f(name + ".bias", d.bias);
    };
    auto spectral = [&](auto& blocks, const std::string& name) {
        for (std::size_t k = 0; k < blocks.size(); ++k) f(name + "." + std::to_string(k), blocks[k]);
    };
    dense(p.lift, "lift");
    spectral(p.decoder, "decoder");
    for (std::size_t t = 0; t < p.layers.size(); ++t) {
        const std::string name = "layers." + std::to_string(t);
        f(name + ".weight", p.layers[t].weight);
        f(name + ".bias", p.layers[t].bias);
        spectral(p.layers[t].blocks, name + ".spectral");
    }
    spectral(p.functional, "functional");
    dense(p.auxiliary.hidden, "auxiliary.hidden");
    dense(p.auxiliary.output, "auxiliary.output");
    dense(p.projection, "projection");
}

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::F2F: return "F2F";
        case Variant::F2V: return "F2V";
        case Variant::V2F: return "V2F";
        case Variant::V2V: return "V2V";
    }
    return "F2F";
}

Variant variant_from_string(const std::string& name) {
    for (Variant v : {Variant::F2F, Variant::F2V, Variant::V2F, Variant::V2V})
        if (to_string(v) == name) return v;
    throw std::invalid_argument("unknown FNM variant '" + name + "' (expected F2F, F2V, V2F or V2V)");
}

bool takes_function(Variant v) { return v == Variant::F2F || v == Variant::F2V; }
bool returns_function(Variant v) { return v == Variant::F2F || v == Variant::V2F; }

FnmParameters FnmParameters::zeros_like() const {
    FnmParameters z = *this;
    visit_blocks(z, [](const std::string&, auto& m) { m.setZero(); });
    return z;
}

std::vector<BlockView> parameter_blocks(FnmParameters& params) {
    std::vector<BlockView> views;
    visit_blocks(params, [&](const std::string& name, auto& m) {
        if (m.size() == 0) return;
        using Scalar = typename std::decay_t<decltype(m)>::Scalar;
        constexpr bool isComplex = !std::is_same_v<Scalar, double>;
        views.push_back({name, reinterpret_cast<double*>(m.data()), m.rows(), m.cols(), isComplex});
    });
    return views;
}

std::size_t parameter_count(const FnmParameters& params) {
    FnmParameters copy = params;
    std::size_t total = 0;
    for (const auto& b : parameter_blocks(copy)) total += static_cast<std::size_t>(b.size());
    return total;
}

FnmParameters zero_parameters(const FnmConfig& c) {
    require(c.inputDim >= 1 && c.outputDim >= 1 && c.width >= 1, "FNM dimensions must be positive");
    require(c.modes >= 0 && c.depth >= 0, "FNM modes and depth must be nonnegative");
    FnmParameters p;
    if (takes_function(c.variant)) {
        p.lift = dense_zeros(c.width, c.inputDim);
    } else {
        require(c.latentDim >= 1, "vector-input variants need a positive latent dimension");
        p.lift = dense_zeros(c.latentDim, c.inputDim);
        p.decoder = blocks_zeros(c.modes, c.width, c.latentDim);
    }
    for (int t = 0; t < c.depth; ++t)
        p.layers.push_back({Eigen::MatrixXd::Zero(c.width, c.width), Eigen::VectorXd::Zero(c.width),
                            blocks_zeros(c.modes, c.width, c.width)});
    if (returns_function(c.variant)) {
        p.projection = dense_zeros(c.outputDim, c.width);
    } else {
        require(c.functionalDim >= 1, "vector-output variants need a positive functional dimension");
        p.functional = blocks_zeros(c.modes, c.functionalDim, c.width);
        if (c.auxiliary) {
            require(c.auxiliaryDim >= 1, "auxiliary branch needs a positive output dimension");
            p.auxiliary.hidden = dense_zeros(c.width, c.width);
            p.auxiliary.output = dense_zeros(c.auxiliaryDim, c.width);
        }
        p.projection = dense_zeros(c.outputDim, head_dim(c));
    }
    return p;
}

FnmParameters init_parameters(const FnmConfig& c, std::uint64_t seed) {
    FnmParameters p = zero_parameters(c);
    auto rng = make_rng(seed, kInitStream);
    glorot(p.lift, rng);
    if (!p.decoder.empty()) complex_gaussian(p.decoder, rng);
    for (auto& layer : p.layers) {
        glorot(layer.weight, rng);
        complex_gaussian(layer.blocks, rng);
    }
    if (!p.functional.empty()) complex_gaussian(p.functional, rng);
    if (p.auxiliary.hidden.weight.size() > 0) {
        glorot(p.auxiliary.hidden, rng);
        glorot(p.auxiliary.output, rng);
    }
    glorot(p.projection, rng);
    return p;
}

Activation layer_activation(const FnmConfig& c, int layer) {
    if (returns_function(c.variant) && c.finalIdentity && layer == c.depth - 1) return Activation::Identity;
    return Activation::Gelu;
}

double sample_norm(const Eigen::MatrixXd& r) {
    return r.rows() == 0 ? 0.0 : std::sqrt(r.squaredNorm() / static_cast<double>(r.rows()));
}

namespace {

void check_pair(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
    if (p.rows() != y.rows() || p.cols() != y.cols())
        throw std::invalid_argument("loss: prediction shape " + std::to_string(p.rows()) + "x" +
                                    std::to_string(p.cols()) + " does not match target " +
                                    std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
}

double sample_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, LossKind kind, Eigen::MatrixXd* grad) {
    check_pair(pred, truth);
    const Eigen::MatrixXd r = pred - truth;
    const double rows = static_cast<double>(r.rows());
    if (kind == LossKind::Squared) {
        if (grad) *grad = 2.0 / rows * r;
        return r.squaredNorm() / rows;
    }
    const double denom = sample_norm(truth) + kRelativeGuard;
    const double norm = sample_norm(r);
    if (grad) *grad = norm > 0.0 ? Eigen::MatrixXd(r / (rows * norm * denom)) : Eigen::MatrixXd::Zero(r.rows(), r.cols());
    return norm / denom;
}

double batch_loss(const std::vector<Eigen::MatrixXd>& predicted, const std::vector<Eigen::MatrixXd>& truth,
                  LossKind kind) {
    require(predicted.size() == truth.size(), "loss: batch sizes differ");
    require(!predicted.empty(), "loss: empty batch");
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) acc += sample_loss(predicted[i], truth[i], kind, nullptr);
    return acc / static_cast<double>(predicted.size());
}

}  // namespace

double loss_relative(const std::vector<Eigen::MatrixXd>& predicted, const std::vector<Eigen::MatrixXd>& truth) {
    return batch_loss(predicted, truth, LossKind::Relative);
}

double loss_squared(const std::vector<Eigen::MatrixXd>& predicted, const std::vector<Eigen::MatrixXd>& truth) {
    return batch_loss(predicted, truth, LossKind::Squared);
}

FnmModel::FnmModel(FnmConfig config, FnmParameters params) : config_(std::move(config)), params_(std::move(params)) {
    validate();
}

FnmModel::FnmModel(const FnmConfig& config, std::uint64_t seed) : FnmModel(config, init_parameters(config, seed)) {}

void FnmModel::validate() const {
    const FnmConfig& c = config_;
    const FnmParameters ref = zero_parameters(c);
    auto same = [](const DenseParams& a, const DenseParams& b, const std::string& what) {
        require_shape(a.weight, b.weight.rows(), b.weight.cols(), what + ".weight");
        require_shape(a.bias, b.bias.rows(), 1, what + ".bias");
    };
    same(params_.lift, ref.lift, "lift");
    if (!ref.decoder.empty()) require_blocks(params_.decoder, c.modes, c.width, c.latentDim, "decoder");
    require(params_.layers.size() == ref.layers.size(), "layer count does not match depth");
    for (std::size_t t = 0; t < ref.layers.size(); ++t) {
        require_shape(params_.layers[t].weight, c.width, c.width, "layer weight");
        require_shape(params_.layers[t].bias, c.width, 1, "layer bias");
        require_blocks(params_.layers[t].blocks, c.modes, c.width, c.width, "layer spectral");
    }
    if (!ref.functional.empty()) require_blocks(params_.functional, c.modes, c.functionalDim, c.width, "functional");
    if (ref.auxiliary.hidden.weight.size() > 0) {
        same(params_.auxiliary.hidden, ref.auxiliary.hidden, "auxiliary.hidden");
        same(params_.auxiliary.output, ref.auxiliary.output, "auxiliary.output");
    }
    same(params_.projection, ref.projection, "projection");
}

Eigen::MatrixXd FnmModel::forward(const Eigen::MatrixXd& input, Eigen::Index resolution) const {
    Trace trace;
    return forward_traced(input, resolution, trace);
}

Eigen::MatrixXd FnmModel::forward_traced(const Eigen::MatrixXd& input, Eigen::Index resolution, Trace& trace) const {
    const FnmConfig& c = config_;
    trace.input = input;
    Field h;
    if (takes_function(c.variant)) {
        if (input.cols() != c.inputDim)
            throw std::invalid_argument("model input has " + std::to_string(input.cols()) + " channels, expected " +
                                        std::to_string(c.inputDim));
        check_resolution(input.rows(), c.modes);
        trace.resolution = input.rows();
        h = dense_forward(params_.lift, input);
    } else {
        if (input.rows() != 1 || input.cols() != c.inputDim)
            throw std::invalid_argument("vector input must be a 1x" + std::to_string(c.inputDim) + " row, got " +
                                        std::to_string(input.rows()) + "x" + std::to_string(input.cols()));
        trace.resolution = resolution > 0 ? resolution : c.resolution;
        check_resolution(trace.resolution, c.modes);
        trace.latent = dense_forward(params_.lift, input).transpose();
        h = decoder_layer_forward(params_.decoder, trace.latent, trace.resolution);
    }
    trace.lifted = h;

    trace.layers.resize(params_.layers.size());
    for (std::size_t t = 0; t < params_.layers.size(); ++t)
        h = fourier_layer_forward(params_.layers[t], h, layer_activation(c, static_cast<int>(t)), &trace.layers[t]);
    trace.last = h;

    if (returns_function(c.variant)) return dense_forward(params_.projection, h);

    trace.lastModes = analysis(h, c.modes);
    trace.head.resize(head_dim(c));
    trace.head.head(c.functionalDim) = functional_layer_from_modes(params_.functional, trace.lastModes);
    if (c.auxiliary) trace.head.tail(c.auxiliaryDim) = auxiliary_forward(params_.auxiliary, h, &trace.aux);
    return dense_forward(params_.projection, trace.head.transpose());
}

void FnmModel::backward(const Trace& trace, const Eigen::MatrixXd& gradOutput, FnmParameters& grad) const {
    const FnmConfig& c = config_;
    Field g;
    if (returns_function(c.variant)) {
        g = dense_backward(params_.projection, trace.last, gradOutput, grad.projection);
    } else {
        const Eigen::VectorXd gHead =
            dense_backward(params_.projection, trace.head.transpose(), gradOutput, grad.projection).transpose();
        g = functional_layer_backward(params_.functional, trace.lastModes, trace.resolution,
                                      gHead.head(c.functionalDim), grad.functional);
        if (c.auxiliary) g += auxiliary_backward(params_.auxiliary, trace.aux, gHead.tail(c.auxiliaryDim), grad.auxiliary);
    }

    for (std::size_t t = params_.layers.size(); t-- > 0;)
        g = fourier_layer_backward(params_.layers[t], trace.layers[t], layer_activation(c, static_cast<int>(t)), g,
                                   grad.layers[t]);

    if (takes_function(c.variant)) {
        dense_backward(params_.lift, trace.input, g, grad.lift);
    } else {
        const Eigen::VectorXd gLatent = decoder_layer_backward(params_.decoder, trace.latent, g, grad.decoder);
        dense_backward(params_.lift, trace.input, gLatent.transpose(), grad.lift);
    }
}

LossAndGradient model_gradient(const FnmModel& model, const std::vector<Eigen::MatrixXd>& inputs,
                               const std::vector<Eigen::MatrixXd>& targets, LossKind kind, Eigen::Index resolution) {
    require(inputs.size() == targets.size(), "model_gradient: input and target counts differ");
    require(!inputs.empty(), "model_gradient: empty batch");
    LossAndGradient out;
    out.gradient = model.parameters().zeros_like();
    const double scale = 1.0 / static_cast<double>(inputs.size());
    FnmModel::Trace trace;
    Eigen::MatrixXd gradOut;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Eigen::MatrixXd pred = model.forward_traced(inputs[i], resolution, trace);
        out.loss += sample_loss(pred, targets[i], kind, &gradOut) * scale;
        model.backward(trace, gradOut * scale, out.gradient);
    }
    return out;
}

}  // namespace ptolearn::fnm
