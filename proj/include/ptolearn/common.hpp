#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptolearn {

using Rng = std::mt19937_64;

/// Per-trial seed; parallel Monte-Carlo stays deterministic regardless of scheduling.
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trialIndex) noexcept {
    return seed ^ trialIndex;
}

/// Decorrelates sub-streams (inputs, noise, shuffling, ...) drawn from one seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(stream_seed(seed, stream));
}

// Stream tags used throughout the library.
inline constexpr std::uint64_t kInputStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;
inline constexpr std::uint64_t kShuffleStream = 3;
inline constexpr std::uint64_t kInitStream = 4;

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slopeStdErr = 0.0;
    double rSquared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits log(y) against log(x); all values must be positive.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

void require(bool condition, const std::string& message);

}  // namespace ptolearn
