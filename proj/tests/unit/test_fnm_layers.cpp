#include <cmath>
#include <random>

#include "doctest.h"
#include "fnm_helpers.hpp"
#include "ptolearn/fnm/layers.hpp"

using namespace ptolearn::fnm;
using namespace fnm_test;

namespace {

// For real Re-pairing of complex gradients: <G, a> = Re sum conj(G) a.
double real_pairing(const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& a) { return (g.conjugate().cwiseProduct(a)).sum().real(); }

FourierLayerParams random_fourier_layer(Eigen::Index dOut, Eigen::Index dIn, int modes, std::mt19937_64& rng) {
    FourierLayerParams p{random_real(dOut, dIn, rng), random_real(dOut, 1, rng).col(0), {}};
    for (int k = 0; k <= modes; ++k) p.blocks.push_back(random_complex(dOut, dIn, rng, 0.5));
    p.blocks[0] = p.blocks[0].real().cast<cd>();
    return p;
}

}  // namespace

TEST_CASE("FFT analysis and synthesis match direct sums") {
    std::mt19937_64 rng(1);
    for (Eigen::Index n : {8, 16, 64}) {
        const int modes = static_cast<int>(n / 2 - 1);
        const Eigen::MatrixXd v = random_real(n, 3, rng);
        CHECK((analysis(v, modes) - direct_analysis(v, modes)).cwiseAbs().maxCoeff() <= 1e-13);

        const Eigen::MatrixXcd a = random_complex(modes + 1, 2, rng);
        const Eigen::MatrixXcd full = symmetric_inverse(a, n);
        const Eigen::MatrixXd y = synthesis(a, n);
        CHECK((y - full.real()).cwiseAbs().maxCoeff() <= 1e-12);
        // Im a_0 drops out; the conjugate-symmetric extension of a real a_0 gives a real field
        Eigen::MatrixXcd realZero = a;
        realZero.row(0) = a.row(0).real().cast<cd>();
        CHECK(symmetric_inverse(realZero, n).imag().cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK_THROWS_AS(analysis(Eigen::MatrixXd::Zero(12, 1), 2), std::invalid_argument);
    CHECK_THROWS_AS(analysis(Eigen::MatrixXd::Zero(8, 1), 4), std::invalid_argument);
}

TEST_CASE("transform adjoints satisfy the pairing identities") {
    std::mt19937_64 rng(2);
    const Eigen::Index n = 32;
    const int modes = 6;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXcd a = random_complex(modes + 1, 2, rng);
        const Eigen::MatrixXd g = random_real(n, 2, rng);
        const double lhs = g.cwiseProduct(synthesis(a, n)).sum();
        CHECK(lhs == doctest::Approx(real_pairing(synthesis_adjoint(g, modes), a)).epsilon(1e-12));

        const Eigen::MatrixXd v = random_real(n, 2, rng);
        const Eigen::MatrixXcd G = random_complex(modes + 1, 2, rng);
        const double lhs2 = real_pairing(G, analysis(v, modes));
        CHECK(lhs2 == doctest::Approx(analysis_adjoint(G, n).cwiseProduct(v).sum()).epsilon(1e-12));
    }
}

TEST_CASE("Fourier layer identity and constant-function contracts") {
    std::mt19937_64 rng(3);
    const int modes = 3;
    FourierLayerParams id{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                          SpectralBlocks(modes + 1, Eigen::MatrixXcd::Zero(2, 2))};
    const Eigen::MatrixXd v = random_real(16, 2, rng);
    CHECK((fourier_layer_forward(id, v, Activation::Identity) - v).cwiseAbs().maxCoeff() <= 1e-15);

    const FourierLayerParams p = random_fourier_layer(3, 2, modes, rng);
    const Eigen::Vector2d c(0.7, -1.1);
    const Eigen::MatrixXd constant = c.transpose().replicate(16, 1);
    const Eigen::MatrixXd out = fourier_layer_forward(p, constant, Activation::Gelu);
    const Eigen::VectorXd pre = p.weight * c + p.blocks[0].real() * c + p.bias;
    for (Eigen::Index i = 0; i < 16; ++i)
        for (Eigen::Index k = 0; k < 3; ++k) CHECK(out(i, k) == doctest::Approx(gelu(pre[k])).epsilon(1e-13));

    CHECK_THROWS_AS(fourier_layer_forward(p, Eigen::MatrixXd::Zero(6, 2), Activation::Gelu), std::invalid_argument);
    CHECK_THROWS_AS(fourier_layer_forward(p, Eigen::MatrixXd::Zero(16, 3), Activation::Gelu), std::invalid_argument);
}

TEST_CASE("Fourier layer output is the same at shared grid points for n and 2n") {
    std::mt19937_64 rng(4);
    const int modes = 5;
    for (int trial = 0; trial < 5; ++trial) {
        const FourierLayerParams p = random_fourier_layer(3, 2, modes, rng);
        const BandLimited h = random_band_limited(modes, 2, rng);
        const Eigen::MatrixXd coarse = fourier_layer_forward(p, h.sample(16), Activation::Gelu);
        const Eigen::MatrixXd fine = fourier_layer_forward(p, h.sample(32), Activation::Gelu);
        for (Eigen::Index i = 0; i < 16; ++i) CHECK((coarse.row(i) - fine.row(2 * i)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("gelu and its derivative") {
    CHECK(gelu(0.0) == 0.0);
    CHECK(gelu(1.0) == doctest::Approx(0.8413447460685429));
    for (double x : {-3.0, -0.4, 0.0, 0.9, 2.5}) {
        const double h = 1e-6;
        CHECK(gelu_derivative(x) == doctest::Approx((gelu(x + h) - gelu(x - h)) / (2 * h)).epsilon(1e-8));
    }
}

TEST_CASE("functional layer extracts means, is linear, and is dual to the decoder") {
    std::mt19937_64 rng(5);
    const int modes = 4;
    const Eigen::Index n = 32;
    FunctionalLayerParams mean(modes + 1, Eigen::MatrixXcd::Zero(2, 2));
    mean[0] = Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::MatrixXd constant = Eigen::RowVector2d(0.3, -2.0).replicate(n, 1);
    const Eigen::VectorXd m = functional_layer_forward(mean, constant);
    CHECK(m[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(m[1] == doctest::Approx(-2.0).epsilon(1e-14));

    FunctionalLayerParams g;
    for (int k = 0; k <= modes; ++k) g.push_back(random_complex(3, 2, rng));
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd h1 = random_real(n, 2, rng), h2 = random_real(n, 2, rng);
        const Eigen::VectorXd sum = functional_layer_forward(g, h1 + h2);
        const Eigen::VectorXd parts = functional_layer_forward(g, h1) + functional_layer_forward(g, h2);
        CHECK((sum - parts).norm() <= 1e-12 * sum.norm());
        CHECK((functional_layer_forward(g, 2.5 * h1) - 2.5 * functional_layer_forward(g, h1)).norm() <=
              1e-12 * sum.norm());

        DecoderLayerParams d;
        for (const auto& b : g) d.push_back(b.adjoint());
        const BandLimited h = random_band_limited(modes + 3, 2, rng);
        const Eigen::MatrixXd hs = h.sample(n);
        const Eigen::VectorXd z = random_real(3, 1, rng).col(0);
        const double lhs = functional_layer_forward(g, hs).dot(z);
        const double rhs = (hs.cwiseProduct(decoder_layer_forward(d, z, n))).sum() / static_cast<double>(n);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("decoder layer embeds constants and round-trips single harmonics") {
    std::mt19937_64 rng(6);
    const int modes = 3;
    const Eigen::Index n = 16;
    DecoderLayerParams d(modes + 1, Eigen::MatrixXcd::Zero(2, 2));
    d[0] = Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::Vector2d z(1.5, -0.25);
    const Eigen::MatrixXd out = decoder_layer_forward(d, z, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(out(i, 0) == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(out(i, 1) == doctest::Approx(-0.25).epsilon(1e-15));
    }
    CHECK(decoder_layer_forward(d, Eigen::Vector2d::Zero(), n).cwiseAbs().maxCoeff() == 0.0);

    DecoderLayerParams one(modes + 1, Eigen::MatrixXcd::Zero(2, 2));
    one[1] = random_complex(2, 2, rng);
    const Eigen::MatrixXd wave = decoder_layer_forward(one, z, n);
    const Eigen::MatrixXcd spectrum = direct_analysis(wave, modes);
    const Eigen::VectorXcd expected = one[1] * z.cast<cd>();
    CHECK((spectrum.row(1).transpose() - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(spectrum.row(0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(spectrum.row(2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(spectrum.row(3).cwiseAbs().maxCoeff() <= 1e-12);
}
