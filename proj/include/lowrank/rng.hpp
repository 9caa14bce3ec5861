#pragma once

#include <cmath>
#include <cstdint>

namespace lowrank {

// 64-bit seed. Equal seeds plus equal parameters reproduce every draw
// bit-for-bit on any platform: the generators below are defined purely over
// unsigned 64-bit arithmetic and a fixed fill order.
using RngSeed = std::uint64_t;

namespace detail {

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Steele/Lea/Vigna). Used for state expansion and for
// deriving per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Documented derivation hash: fold each salt into the running state with one
// SplitMix64 round. Concurrent trials use derive_seed(base, cell..., trial)
// so their streams never collide across grid cells or trial indices.
template <class... Salts>
constexpr RngSeed derive_seed(RngSeed base, Salts... salts) noexcept {
    std::uint64_t x = detail::mix64(base + detail::kSplitMixGamma);
    ((x = detail::mix64(x + detail::kSplitMixGamma + static_cast<std::uint64_t>(salts))), ...);
    return x;
}

// xoshiro256** 1.0 (Blackman/Vigna); state seeded through SplitMix64 as the
// authors recommend, so nearby seeds give unrelated streams.
class Rng {
public:
    explicit constexpr Rng(RngSeed seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += detail::kSplitMixGamma;
            word = detail::mix64(x);
        }
    }

    constexpr std::uint64_t next() noexcept {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1), 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() noexcept {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    // Box-Muller; consumes two uniforms per normal.
    double normal() noexcept {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::uint64_t state_[4];
};

} // namespace lowrank
