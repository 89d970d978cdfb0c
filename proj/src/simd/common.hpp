#pragma once

// Helpers shared by the scalar and AVX2 kernel translation units. They live
// in the scalar unit so both variants call the same compiled code.

#include <cstdint>

#include "splitwalk/rng.hpp"
#include "splitwalk/simd/kernels.hpp"

namespace splitwalk::simd::detail {

/// Two independent standard normals by Box-Muller.
void gaussian_pair(RngStream& rng, double& z1, double& z2) noexcept;

[[noreturn]] void throw_trajectory_overrun(std::uint64_t trajectory, std::uint64_t max_steps);

/// Lane masks of the six low assignment bits within a 64-assignment word.
inline constexpr std::uint64_t kLowVarMask[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};

/// Mask of lanes of the word starting at `base` whose index lies in [begin, end).
inline std::uint64_t valid_lanes(std::uint64_t base, std::uint64_t begin, std::uint64_t end) noexcept {
    std::uint64_t m = ~0ULL;
    if (begin > base) m &= begin - base >= 64 ? 0 : ~0ULL << (begin - base);
    if (end < base + 64) m &= end <= base ? 0 : ~0ULL >> (64 - (end - base));
    return m;
}

/// Mask of variable `v` (0-based) over the word starting at `base`.
inline std::uint64_t var_mask(int v, std::uint64_t base) noexcept {
    if (v < 6) return kLowVarMask[v];
    return ((base >> v) & 1ULL) ? ~0ULL : 0ULL;
}

}  // namespace splitwalk::simd::detail
