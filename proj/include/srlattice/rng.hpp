#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
// Every draw is a pure function of (seed, path, step), so simulations are
// reproducible independently of thread count and scheduling.

#include <array>
#include <cmath>
#include <cstdint>

namespace srl {

struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::uint64_t ctr_hi,
                                              std::uint64_t ctr_lo) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
        std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
        std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
            std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            c0 = n0;
            c1 = lo1;
            c2 = n2;
            c3 = lo0;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return {c0, c1, c2, c3};
    }
};

/// Uniform in (0,1], 53-bit resolution, from two 32-bit words.
inline double uniform_open(std::uint32_t a, std::uint32_t b) {
    std::uint64_t m = (static_cast<std::uint64_t>(a & 0x1FFFFFu) << 32) | b;
    return (static_cast<double>(m) + 1.0) * 0x1.0p-53;
}

struct GaussPair {
    double z1, z2;
};

/// Two independent standard normals for simulation step `step` of path
/// `path` under the given seed (Box-Muller on one Philox block).
inline GaussPair normal_pair(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    auto w = Philox4x32::block(seed, path, step);
    double u1 = uniform_open(w[0], w[1]);
    double u2 = uniform_open(w[2], w[3]);
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

/// One uniform in (0,1] per (seed, path, step).
inline double uniform_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    auto w = Philox4x32::block(seed, path, step);
    return uniform_open(w[0], w[1]);
}

/// Fair sign in {-1,+1}.
inline int sign_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    auto w = Philox4x32::block(seed, path, step);
    return (w[0] & 1u) ? 1 : -1;
}

} // namespace srl
