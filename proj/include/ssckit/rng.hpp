// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace ssc {

/// SplitMix64: tiny, fast, platform-independent PRNG. Used everywhere a
/// seeded stream is needed so results are reproducible across compilers and
/// standard libraries (std::mt19937 distributions are not portable).
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n). n must be positive; modulo bias is
    /// irrelevant at the stream lengths used here.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }
};

/// Derives an independent child seed from a parent seed and a stream index,
/// so per-object / per-instance streams can be split deterministically.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mix(seed ^ (0x517cc1b727220a95ULL * (stream + 1)));
    return mix.next();
}

}  // namespace ssc
