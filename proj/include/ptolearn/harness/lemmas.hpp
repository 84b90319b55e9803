#pragma once

// Numerical checks of the series-decay, effective-dimension and regularized-inverse lemmas.

#include <cstdint>
#include <string>
#include <vector>

namespace ptolearn::harness {

struct LemmaCheck {
    std::string name;
    double value = 0.0;     // fitted slope, or worst residual
    double target = 0.0;
    double tolerance = 0.0; // |value - target| <= tolerance, or value <= tolerance when target is 0 and isBound
    bool isBound = false;
    bool passed = false;
};

/// Power-law series slopes for the three regimes over N = 2^6..2^16, effective-dimension
/// slopes for three (alpha, p) pairs over mu = 1e-1..1e-6 and the worst regularized-inverse
/// residual over 100 random PSD pairs.
std::vector<LemmaCheck> verify_lemmas(std::uint64_t seed);

}  // namespace ptolearn::harness
