#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace repdesc {

/// SplitMix64 step, used to expand a 64-bit seed into generator state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman/Vigna), seeded through SplitMix64.
///
/// Hand-rolled instead of <random> because the standard distributions are
/// implementation-defined: identical seeds must reproduce identical draws on
/// every platform and toolchain. All derived draws below are fixed recipes
/// over the raw 64-bit stream and are part of the reproducibility contract.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unit-rate exponential via the inverse CDF; -log1p(-u) is exact at u=0.
    double exponential() { return -std::log1p(-uniform01()); }

    /// Standard normal, Box-Muller cosine branch. Consumes exactly two
    /// uniforms per call and carries no state between calls.
    double normal() {
        const double u1 = 1.0 - uniform01();  // in (0, 1], keeps the log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Seed for an independent per-trial stream: the trial index is folded in by
/// a Weyl step, so any subset of trials reproduces regardless of scheduling.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
}

inline Xoshiro256pp trial_stream(std::uint64_t seed, std::uint64_t trial) {
    return Xoshiro256pp(trial_seed(seed, trial));
}

}  // namespace repdesc
