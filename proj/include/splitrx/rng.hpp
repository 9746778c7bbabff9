#pragma once

// Deterministic random number generation for reproducible simulation.
//
// All randomness in the library flows from explicit 64-bit seeds. Worker
// streams are derived with derive_seed(), so results never depend on thread
// count or scheduling. The generator is xoshiro256++ (Blackman & Vigna,
// public domain) seeded through splitmix64; normals come from Box-Muller so
// the byte stream is identical across standard libraries.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace splitrx {

// splitmix64 finalizer; also used as a seed/stream mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent stream seed for worker/grid-point `salt` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    return mix64(seed ^ mix64(salt + 0x9E3779B97F4A7C15ULL));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) noexcept {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s = mix64(s);
            w = s;
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() noexcept {
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

    // Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) noexcept {
        // multiply-shift; bias is < 2^-64 per draw and the mapping is fixed
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal, Box-Muller with one cached value.
    double normal() noexcept {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double t = 2.0 * std::numbers::pi * uniform();
        cache_ = r * std::sin(t);
        has_cache_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

    // Circularly-symmetric complex Gaussian with total variance `variance`
    // (variance/2 per real component).
    std::complex<double> complex_normal(double variance) noexcept {
        const double s = std::sqrt(variance * 0.5);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double cache_ = 0.0;
    bool has_cache_ = false;
};

}  // namespace splitrx
