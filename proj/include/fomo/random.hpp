#pragma once

// Seedable, platform-independent random numbers.
//
// Every stream in the library is a xoshiro256** generator whose 256-bit state
// is filled from a SplitMix64 sequence started at a 64-bit seed. Sub-streams
// (one per document, one per shuffle trial) get their seed from
// derive_seed(parent, index), so results never depend on the order in which
// the sub-streams are consumed.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace fomo {

// SplitMix64 output function (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Seed for sub-stream `index` of a stream seeded with `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(mix64(parent) + kGoldenGamma * (index + 1));
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t operator()() noexcept {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman & Vigna). Models UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

// Uniform double in [0, 1) built from the top 53 bits of one draw.
template <class Gen>
double uniform01(Gen& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound), bound > 0. Lemire's multiply-and-reject
// method; exact, no modulo bias.
template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
    using u128 = unsigned __int128;
    u128 product = static_cast<u128>(gen()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            product = static_cast<u128>(gen()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

// Number of Bernoulli(p) trials up to and including the first success,
// by inversion. Saturates at uint64 max for astronomically small p.
template <class Gen>
std::uint64_t geometric_trials(Gen& gen, double p) {
    if (p >= 1.0) return 1;
    const double u = 1.0 - uniform01(gen);  // (0, 1]
    const double k = std::floor(std::log(u) / std::log1p(-p));
    if (!(k < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return 1 + static_cast<std::uint64_t>(k);
}

}  // namespace fomo
