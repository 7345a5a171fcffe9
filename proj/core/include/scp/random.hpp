#pragma once

#include <cstdint>
#include <random>

namespace scp {

/// Seeded generator used everywhere randomness is needed. mt19937_64 output
/// is fully specified by the standard; the helpers below avoid the
/// implementation-defined std distributions so results are portable.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection sampling. n must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = Rng::max() - (Rng::max() % n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal deviate (Box-Muller, one value per call).
double standard_normal(Rng& rng);

/// Derives an independent stream seed from a base seed and a stream index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace scp
