#pragma once

#include <cmath>
#include <cstdint>

namespace sflob {

/// SplitMix64 finalizer. Bijective on 64-bit integers.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator. Self-contained so that streams are bit-identical
/// across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // Expand the seed with SplitMix64, the recommended seeding procedure.
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = s;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            w = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
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

    /// Uniform double in [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0,1]; safe as a log() argument.
    double uniform01_open() { return 1.0 - uniform01(); }

    /// Unbiased uniform integer in [0, n), n >= 1. Rejection sampling.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Exponential waiting time with the given rate.
    double exponential(double rate) { return -std::log(uniform01_open()) / rate; }

    /// Poisson sample by CDF inversion; intended for small means.
    long poisson(double mean) {
        double p = std::exp(-mean);
        double cdf = p;
        const double u = uniform01();
        long k = 0;
        while (u >= cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p < 1e-300) break;
        }
        return k;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace sflob
