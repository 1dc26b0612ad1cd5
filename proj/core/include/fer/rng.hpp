#pragma once

#include <cmath>
#include <cstdint>

namespace fer::rng {

// Counter-based stream: every draw is a pure function of (seed, path, step, dim),
// so parallel Monte Carlo is schedule-independent by construction.

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                              std::uint64_t dim) {
    std::uint64_t h = seed + 0x9e3779b97f4a7c15ULL;
    h = mix64(h ^ (path * 0xd1b54a32d192ed03ULL));
    h = mix64(h ^ (step * 0x8cb92ba72f3d8dd7ULL));
    h = mix64(h ^ (dim * 0xa24baed4963ee407ULL));
    return mix64(h);
}

// uniform in (0, 1]
inline double draw_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                           std::uint64_t dim) {
    return (static_cast<double>(draw_u64(seed, path, step, dim) >> 11) + 1.0) * 0x1.0p-53;
}

struct NormalPair {
    double z1;
    double z2;
};

// Box-Muller on dims (2k, 2k+1)
inline NormalPair draw_normal_pair(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                   std::uint64_t pair = 0) {
    const double u1 = draw_uniform(seed, path, step, 2 * pair);
    const double u2 = draw_uniform(seed, path, step, 2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

inline double draw_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                          std::uint64_t dim = 0) {
    const NormalPair p = draw_normal_pair(seed, path, step, dim);
    return p.z1;
}

}  // namespace fer::rng
