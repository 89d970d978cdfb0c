// Compiled with -mavx2 only (no -mfma) so products and sums round exactly as
// in the scalar reference.

#include <immintrin.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "common.hpp"

namespace splitwalk::simd {

namespace {

constexpr int kLanes = 4;

struct Lane {
    std::optional<RngStream> rng;
    std::uint64_t trajectory = 0;
    std::uint64_t steps = 0;
};

}  // namespace

void diffusion_scores_avx2(const DiffusionParams& p, std::uint64_t key, std::uint64_t first,
                           std::span<double> out) {
    const std::uint64_t end = first + out.size();
    const double noise = std::sqrt(2.0 * p.dt / p.beta);
    const double phi0 = 0.5 * (1.0 + p.u1);

    alignas(32) std::array<double, kLanes> x{}, y{}, sup{}, z1{}, z2{}, phi{};
    std::array<Lane, kLanes> lanes;
    std::uint64_t next = first;

    auto load = [&](int l) {
        while (next < end) {
            const std::uint64_t j = next++;
            if (!(phi0 > 0.0 && phi0 < 1.0)) {
                out[j - first] = phi0;  // starts inside A or B
                continue;
            }
            lanes[l] = {RngStream(key, j), j, 0};
            x[l] = p.u1;
            y[l] = p.u2;
            sup[l] = phi0;
            return;
        }
        lanes[l].rng.reset();
        x[l] = y[l] = sup[l] = 0.0;
    };
    for (int l = 0; l < kLanes; ++l) load(l);

    const __m256d va = _mm256_set1_pd(p.a);
    const __m256d vb = _mm256_set1_pd(p.b);
    const __m256d vdt = _mm256_set1_pd(p.dt);
    const __m256d vnoise = _mm256_set1_pd(noise);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);

    for (;;) {
        bool any = false;
        for (int l = 0; l < kLanes; ++l) {
            if (lanes[l].rng) {
                any = true;
                if (lanes[l].steps == p.max_steps) {
                    detail::throw_trajectory_overrun(lanes[l].trajectory, p.max_steps);
                }
                detail::gaussian_pair(*lanes[l].rng, z1[l], z2[l]);
            } else {
                z1[l] = z2[l] = 0.0;
            }
        }
        if (!any) break;

        const __m256d vx = _mm256_load_pd(x.data());
        const __m256d vy = _mm256_load_pd(y.data());
        // g1 = a x y y - (x - x x x)
        const __m256d g1 = _mm256_sub_pd(
            _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(va, vx), vy), vy),
            _mm256_sub_pd(vx, _mm256_mul_pd(_mm256_mul_pd(vx, vx), vx)));
        // g2 = a x x y - b (y - y y y)
        const __m256d g2 = _mm256_sub_pd(
            _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(va, vx), vx), vy),
            _mm256_mul_pd(vb, _mm256_sub_pd(vy, _mm256_mul_pd(_mm256_mul_pd(vy, vy), vy))));
        const __m256d nx = _mm256_add_pd(_mm256_sub_pd(vx, _mm256_mul_pd(g1, vdt)),
                                         _mm256_mul_pd(vnoise, _mm256_load_pd(z1.data())));
        const __m256d ny = _mm256_add_pd(_mm256_sub_pd(vy, _mm256_mul_pd(g2, vdt)),
                                         _mm256_mul_pd(vnoise, _mm256_load_pd(z2.data())));
        const __m256d vphi = _mm256_mul_pd(half, _mm256_add_pd(one, nx));
        _mm256_store_pd(x.data(), nx);
        _mm256_store_pd(y.data(), ny);
        _mm256_store_pd(phi.data(), vphi);
        _mm256_store_pd(sup.data(), _mm256_max_pd(_mm256_load_pd(sup.data()), vphi));

        const __m256d inside = _mm256_and_pd(_mm256_cmp_pd(vphi, _mm256_setzero_pd(), _CMP_GT_OQ),
                                             _mm256_cmp_pd(vphi, one, _CMP_LT_OQ));
        const int still = _mm256_movemask_pd(inside);
        for (int l = 0; l < kLanes; ++l) {
            if (!lanes[l].rng) continue;
            ++lanes[l].steps;
            if (!(still & (1 << l))) {
                out[lanes[l].trajectory - first] = sup[l];
                load(l);
            }
        }
    }
}

std::uint64_t count_models_avx2(const FlatCnf& cnf, std::uint64_t begin, std::uint64_t end) {
    std::uint64_t total = 0;
    const std::size_t clauses = cnf.offsets.size() - 1;
    const __m256i ones = _mm256_set1_epi64x(-1);
    struct Mask { __m256i v; };
    std::vector<Mask> masks(static_cast<std::size_t>(cnf.num_vars));
    for (std::uint64_t base = begin & ~255ULL; base < end; base += 256) {
        for (int v = 0; v < cnf.num_vars; ++v) {
            masks[v].v = _mm256_set_epi64x(static_cast<long long>(detail::var_mask(v, base + 192)),
                                         static_cast<long long>(detail::var_mask(v, base + 128)),
                                         static_cast<long long>(detail::var_mask(v, base + 64)),
                                         static_cast<long long>(detail::var_mask(v, base)));
        }
        __m256i sat = _mm256_set_epi64x(static_cast<long long>(detail::valid_lanes(base + 192, begin, end)),
                                        static_cast<long long>(detail::valid_lanes(base + 128, begin, end)),
                                        static_cast<long long>(detail::valid_lanes(base + 64, begin, end)),
                                        static_cast<long long>(detail::valid_lanes(base, begin, end)));
        for (std::size_t c = 0; c < clauses; ++c) {
            __m256i clause = _mm256_setzero_si256();
            for (std::uint32_t i = cnf.offsets[c]; i < cnf.offsets[c + 1]; ++i) {
                const std::int32_t lit = cnf.lits[i];
                const __m256i m = masks[static_cast<std::size_t>(std::abs(lit) - 1)].v;
                clause = _mm256_or_si256(clause, lit > 0 ? m : _mm256_xor_si256(m, ones));
            }
            sat = _mm256_and_si256(sat, clause);
            if (_mm256_testz_si256(sat, sat)) break;
        }
        alignas(32) std::array<std::uint64_t, 4> words;
        _mm256_store_si256(reinterpret_cast<__m256i*>(words.data()), sat);
        for (std::uint64_t w : words) total += static_cast<std::uint64_t>(std::popcount(w));
    }
    return total;
}

}  // namespace splitwalk::simd
