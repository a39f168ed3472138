// SPDX-License-Identifier: Apache-2.0
//
// Deterministic seeded RNG used for channel sampling and randomization.
//
// std::normal_distribution and friends are implementation-defined, so all
// draws here are built from a splitmix64 counter generator plus an explicit
// Box-Muller transform.  A given (seed, stream key) pair therefore produces
// bit-identical draws on every platform with IEEE doubles and the same libm.
//
// Streams are keyed so that independent objects (one key per channel link)
// never share draws: adding a user or a cell leaves every other stream's
// sequence untouched.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace irsbf::rng {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Stream {
  public:
    // A stream is identified by a root seed and a 64-bit key.  Distinct keys
    // give statistically independent sequences.
    Stream(std::uint64_t seed, std::uint64_t key)
        : state_(splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL *
                                           (splitmix64_mix(key) | 1ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_mix(state_);
    }

    // Uniform in [0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; used where log() must not see zero.
    double next_uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard circularly-symmetric complex normal CN(0, 1):
    // real and imaginary parts are N(0, 1/2).
    std::complex<double> next_cnormal() {
        const double r = std::sqrt(-std::log(next_uniform_pos()));
        const double th = 6.283185307179586476925286766559 * next_uniform();
        return {r * std::cos(th), r * std::sin(th)};
    }

    // Standard real normal N(0, 1).  One Box-Muller pair per call; the sine
    // partner is deliberately discarded to keep the draw count per entry
    // fixed (stability of substreams under code changes elsewhere).
    double next_normal() {
        const double r = std::sqrt(-2.0 * std::log(next_uniform_pos()));
        const double th = 6.283185307179586476925286766559 * next_uniform();
        return r * std::cos(th);
    }

  private:
    std::uint64_t state_;
};

// Stream keys.  Packs a link kind and up to three indices.
enum class StreamKind : std::uint64_t {
    BsIrs = 1,     // G_b entries, key indices (b, 0, 0)
    Direct = 2,    // BS i -> user j direct channel, key indices (i, j, 0)
    IrsUser = 3,   // IRS -> user j channel, key indices (j, 0, 0)
    Placement = 4, // random user placement, key indices (b, k, 0)
    Randomize = 5, // Gaussian randomization draws
    Scheme = 6,    // benchmark scheme internals (random phases)
};

inline std::uint64_t stream_key(StreamKind kind, std::uint64_t i = 0,
                                std::uint64_t j = 0, std::uint64_t k = 0) {
    return (static_cast<std::uint64_t>(kind) << 48) | ((i & 0xFFFF) << 32) |
           ((j & 0xFFFF) << 16) | (k & 0xFFFF);
}

}  // namespace irsbf::rng
