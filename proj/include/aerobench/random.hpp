#pragma once

// Portable random streams. std::mt19937_64 output is fully specified by the
// standard, but the std distributions are not, so the conversions to reals
// and bounded integers are spelled out here to keep seeded results
// identical across standard libraries.

#include <cstdint>
#include <random>

namespace aerobench {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection of the biased tail.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n);
    for (;;) {
        const std::uint64_t x = rng();
        if (x <= limit) {
            return x % n;
        }
    }
}

} // namespace aerobench
