#pragma once

#include <cmath>
#include <cstdint>

namespace rflow {

// Counter-based RNG (Philox4x32-10). Each (key, counter) pair maps to four
// independent 32-bit words, so a draw is addressed by (seed, stream, step,
// coordinate) and never depends on evaluation order. This is what makes
// shared-noise sweeps and multi-worker runs bit-reproducible.

struct PhiloxKey {
    std::uint32_t k0, k1;
};

struct PhiloxCtr {
    std::uint32_t c0, c1, c2, c3;
};

namespace detail {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace detail

inline PhiloxCtr philox4x32_10(PhiloxCtr c, PhiloxKey k) {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo(M0, c.c0, hi0, lo0);
        detail::mulhilo(M1, c.c2, hi1, lo1);
        c = PhiloxCtr{hi1 ^ c.c1 ^ k.k0, lo1, hi0 ^ c.c3 ^ k.k1, lo0};
        k.k0 += W0;
        k.k1 += W1;
    }
    return c;
}

/// Uniform draw on [0, 1) for the lane (seed, stream, step, coord).
inline double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                         std::uint32_t coord) {
    const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const PhiloxCtr ctr{coord ^ 0x55555555u, static_cast<std::uint32_t>(stream),
                        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)};
    const PhiloxCtr r = philox4x32_10(ctr, key);
    const std::uint64_t a = (static_cast<std::uint64_t>(r.c0) << 32) | r.c1;
    return static_cast<double>(a >> 11) * 0x1.0p-53;
}

/// One standard normal deviate for the lane (seed, stream, step, coord),
/// via Box-Muller on the four Philox output words.
inline double gaussian_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                          std::uint32_t coord) {
    const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const PhiloxCtr ctr{coord, static_cast<std::uint32_t>(stream),
                        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)};
    const PhiloxCtr r = philox4x32_10(ctr, key);
    const std::uint64_t a = (static_cast<std::uint64_t>(r.c0) << 32) | r.c1;
    const std::uint64_t b = (static_cast<std::uint64_t>(r.c2) << 32) | r.c3;
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;        // [0, 1)
    constexpr double two_pi = 6.28318530717958647692528676655900577;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace rflow
