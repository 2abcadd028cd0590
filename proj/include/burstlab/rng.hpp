#pragma once

#include <cstdint>
#include <cmath>

// Self-contained random number generation. The standard library's
// distributions are implementation-defined, which would break the
// bit-for-bit reproducibility contract of the simulators, so both the
// engine (xoshiro256++) and the normal sampler (Marsaglia polar) are
// fixed algorithms here.

namespace burstlab {

// SplitMix64 step. Also used to derive independent stream seeds:
// stream k of base seed s starts from splitmix64 state s + k*GOLDEN.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derived seed for substream `stream` of `base`. Streams with distinct
// indices are statistically independent for practical purposes.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base + stream * 0x9E3779B97F4A7C15ULL;
    return splitmix64_next(s);
}

// xoshiro256++ 1.0 (Blackman & Vigna), seeded through SplitMix64.
class Xoshiro256 {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as an argument to log().
    double uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Standard normal draws via the Marsaglia polar method, with the usual
// one-value cache. Deterministic given the engine state.
class NormalSampler {
  public:
    double operator()(Xoshiro256& rng) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng.uniform() - 1.0;
            v = 2.0 * rng.uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    void reset() { have_spare_ = false; }

  private:
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace burstlab
