#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "isacfp/linalg.hpp"

namespace isacfp {

using Rng = std::mt19937_64;

/// Purpose tags for child streams. Values are part of the reproducibility contract.
enum class StreamTag : std::uint64_t {
    topology = 1,
    channels = 2,
    init = 3,
    symbols = 4,
    echo_noise = 5,
    scenario = 6,
    power_method = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based child seed: mix(mix(mix(seed) ^ counter) ^ tag).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter, StreamTag tag) {
    return splitmix64(splitmix64(splitmix64(seed) ^ counter) ^ static_cast<std::uint64_t>(tag));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t counter, StreamTag tag) {
    return Rng(derive_seed(seed, counter, tag));
}

/// One CN(0, 1) draw.
inline cplx complex_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline CMat complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    CMat m(rows, cols);
    // column-major fill order is part of the determinism contract
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal(rng);
    return m;
}

inline double uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
}

}  // namespace isacfp
