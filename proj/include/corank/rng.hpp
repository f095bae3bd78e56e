// Counter-based random number generation (Philox4x32-10).
//
// Every stochastic component of the library draws from a PhiloxEngine keyed
// by (seed, stream). Streams with distinct keys are statistically
// independent, so Monte Carlo replicates can be dispatched to worker threads
// in any order and still produce identical results.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace corank {

namespace detail {

struct Philox4x32State {
    std::array<std::uint32_t, 4> counter{};
    std::array<std::uint32_t, 2> key{};
};

inline std::uint32_t mulhi32(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
}

inline std::array<std::uint32_t, 4> philox4x32_10(Philox4x32State s) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    auto ctr = s.counter;
    auto key = s.key;
    for (int round = 0; round < 10; ++round) {
        const std::uint32_t hi0 = mulhi32(kMul0, ctr[0]);
        const std::uint32_t lo0 = kMul0 * ctr[0];
        const std::uint32_t hi1 = mulhi32(kMul1, ctr[2]);
        const std::uint32_t lo1 = kMul1 * ctr[2];
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

}  // namespace detail

/// Philox4x32-10 engine exposed as a 64-bit UniformRandomBitGenerator.
///
/// The key is derived from a 64-bit master seed and a 64-bit stream id;
/// the 128-bit counter gives each stream 2^128 values.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;

    explicit PhiloxEngine(std::uint64_t seed, std::uint64_t stream = 0) {
        state_.key = {static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32)};
        state_.counter = {static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32), 0u, 0u};
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        if (buffered_ == 0) {
            block_ = detail::philox4x32_10(state_);
            advance_counter();
            buffered_ = 2;
        }
        --buffered_;
        const int base = 2 * (1 - buffered_);
        return (static_cast<std::uint64_t>(block_[base + 1]) << 32) |
               block_[base];
    }

private:
    void advance_counter() {
        // Counter words [2], [3] index blocks within the stream.
        if (++state_.counter[2] == 0) ++state_.counter[3];
    }

    detail::Philox4x32State state_;
    std::array<std::uint32_t, 4> block_{};
    int buffered_ = 0;
};

/// Uniform draw on (0, 1]; never returns 0, so it is safe under log().
inline double uniform01(PhiloxEngine& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}

/// Standard normal via Box-Muller on the Philox stream.
class NormalSampler {
public:
    explicit NormalSampler(PhiloxEngine& rng) : rng_(rng) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01(rng_);
        const double u2 = uniform01(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    PhiloxEngine& rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Uniform integer in [0, bound) by rejection; unbiased.
inline std::uint64_t uniform_below(PhiloxEngine& rng, std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

}  // namespace corank
