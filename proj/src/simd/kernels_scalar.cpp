#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <string_view>

#include "common.hpp"
#include "splitwalk/errors.hpp"

namespace splitwalk::simd {

namespace detail {

void gaussian_pair(RngStream& rng, double& z1, double& z2) noexcept {
    const double radius = std::sqrt(-2.0 * std::log(rng.uniform()));
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    z1 = radius * std::cos(angle);
    z2 = radius * std::sin(angle);
}

void throw_trajectory_overrun(std::uint64_t trajectory, std::uint64_t max_steps) {
    throw SamplingError("trajectory " + std::to_string(trajectory) + " did not reach A or B within " +
                        std::to_string(max_steps) + " steps");
}

}  // namespace detail

namespace {

Isa detect() noexcept {
    if (const char* env = std::getenv("SPLITWALK_SIMD"); env && std::string_view(env) == "scalar") {
        return Isa::Scalar;
    }
    return supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

Isa& current() noexcept {
    static Isa isa = detect();
    return isa;
}

}  // namespace

const char* to_string(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool supported(Isa isa) noexcept {
    if (isa == Isa::Scalar) return true;
#if defined(SPLITWALK_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() noexcept { return current(); }

void set_isa(Isa isa) noexcept { current() = supported(isa) ? isa : Isa::Scalar; }

void diffusion_scores_scalar(const DiffusionParams& p, std::uint64_t key, std::uint64_t first,
                             std::span<double> out) {
    const double noise = std::sqrt(2.0 * p.dt / p.beta);
    for (std::size_t t = 0; t < out.size(); ++t) {
        RngStream rng(key, first + t);
        double x = p.u1;
        double y = p.u2;
        double sup = 0.5 * (1.0 + x);
        double phi = sup;
        std::uint64_t steps = 0;
        while (phi > 0.0 && phi < 1.0) {
            if (steps == p.max_steps) detail::throw_trajectory_overrun(first + t, p.max_steps);
            double z1, z2;
            detail::gaussian_pair(rng, z1, z2);
            const double g1 = p.a * x * y * y - (x - x * x * x);
            const double g2 = p.a * x * x * y - p.b * (y - y * y * y);
            x = x - g1 * p.dt + noise * z1;
            y = y - g2 * p.dt + noise * z2;
            phi = 0.5 * (1.0 + x);
            sup = std::max(sup, phi);
            ++steps;
        }
        out[t] = sup;
    }
}

std::uint64_t count_models_scalar(const FlatCnf& cnf, std::uint64_t begin, std::uint64_t end) {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> masks(static_cast<std::size_t>(cnf.num_vars));
    const std::size_t clauses = cnf.offsets.size() - 1;
    for (std::uint64_t base = begin & ~63ULL; base < end; base += 64) {
        for (int v = 0; v < cnf.num_vars; ++v) masks[v] = detail::var_mask(v, base);
        std::uint64_t sat = detail::valid_lanes(base, begin, end);
        for (std::size_t c = 0; c < clauses && sat; ++c) {
            std::uint64_t clause = 0;
            for (std::uint32_t i = cnf.offsets[c]; i < cnf.offsets[c + 1]; ++i) {
                const std::int32_t lit = cnf.lits[i];
                const std::uint64_t m = masks[static_cast<std::size_t>(std::abs(lit) - 1)];
                clause |= lit > 0 ? m : ~m;
            }
            sat &= clause;
        }
        total += static_cast<std::uint64_t>(std::popcount(sat));
    }
    return total;
}

void diffusion_scores(const DiffusionParams& p, std::uint64_t key, std::uint64_t first,
                      std::span<double> out) {
    if (active_isa() == Isa::Avx2 && out.size() > 1) {
        diffusion_scores_avx2(p, key, first, out);
    } else {
        diffusion_scores_scalar(p, key, first, out);
    }
}

std::uint64_t count_models(const FlatCnf& cnf, std::uint64_t begin, std::uint64_t end) {
    return active_isa() == Isa::Avx2 ? count_models_avx2(cnf, begin, end)
                                     : count_models_scalar(cnf, begin, end);
}

#if !defined(SPLITWALK_HAVE_AVX2)
void diffusion_scores_avx2(const DiffusionParams& p, std::uint64_t key, std::uint64_t first,
                           std::span<double> out) {
    diffusion_scores_scalar(p, key, first, out);
}

std::uint64_t count_models_avx2(const FlatCnf& cnf, std::uint64_t begin, std::uint64_t end) {
    return count_models_scalar(cnf, begin, end);
}
#endif

}  // namespace splitwalk::simd
