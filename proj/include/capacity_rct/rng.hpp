#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace capacity_rct {

// SplitMix64 one-round (Steele / Vigna).
inline std::uint64_t splitmix64(std::uint64_t x) {
    static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;
    x += kPhi;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream-splitting rule: substream `index` of `base_seed` is seeded with
// splitmix64(base_seed + index * phi). Permuting the order in which streams
// are consumed cannot change any stream's output.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t index) {
    static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;
    return splitmix64(base_seed + index * kPhi);
}

inline std::mt19937_64 make_engine(std::uint64_t base_seed, std::uint64_t stream_index) {
    return std::mt19937_64{derive_stream_seed(base_seed, stream_index)};
}

// Uniform draw in [0, 1) with 53 random bits; independent of any
// platform-specific std::uniform_real_distribution behavior.
inline double uniform01(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Inverse-transform exponential sample.
inline double sample_exponential(std::mt19937_64& engine, double rate) {
    if (rate <= 0.0) throw std::domain_error("sample_exponential: rate must be positive");
    return -std::log1p(-uniform01(engine)) / rate;
}

// Inverse-CDF sample from a discrete distribution given as probabilities.
inline std::size_t sample_discrete(std::mt19937_64& engine, std::span<const double> probs) {
    const double u = uniform01(engine);
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
}

}  // namespace capacity_rct
