#include "splitwalk/targets/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "splitwalk/errors.hpp"

namespace splitwalk {

void DiffusionConfig::validate() const {
    if (!(beta > 0.0)) throw ParameterError("beta must be positive");
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(u0[0]) || !std::isfinite(u0[1])) {
        throw ParameterError("diffusion parameters must be finite");
    }
    if (max_steps == 0 || rejection_cap == 0) throw ParameterError("step and rejection caps must be positive");
}

simd::DiffusionParams DiffusionConfig::kernel_params() const {
    return {a, b, beta, dt, u0[0], u0[1], max_steps};
}

double diffusion_score(const DiffusionConfig& cfg, RngStream& rng) {
    double score = 0.0;
    simd::diffusion_scores_scalar(cfg.kernel_params(), rng.next_u64(), 0, {&score, 1});
    return score;
}

ConditionalDraw diffusion_conditional(const DiffusionConfig& cfg, double bound, Strictness strictness,
                                      RngStream& rng) {
    const auto params = cfg.kernel_params();
    const std::uint64_t key = rng.next_u64();
    const bool strict = strictness == Strictness::Strict;
    // The first trajectory is often accepted; later blocks grow so the SIMD
    // lanes stay busy without simulating far past the accepted index.
    std::vector<double> scores;
    std::uint64_t first = 0;
    std::uint64_t block = 1;
    while (first < cfg.rejection_cap) {
        scores.resize(static_cast<std::size_t>(std::min(block, cfg.rejection_cap - first)));
        simd::diffusion_scores(params, key, first, scores);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (strict ? scores[i] > bound : scores[i] >= bound) return {scores[i], first + i + 1};
        }
        first += scores.size();
        block = std::min<std::uint64_t>(block == 1 ? 4 : block * 2, 64);
    }
    throw SamplingError("diffusion rejection sampler starved: no score " + std::string(strict ? "> " : ">= ") +
                        std::to_string(bound) + " in " + std::to_string(cfg.rejection_cap) + " trajectories");
}

double DiffusionSampler::sample_initial(RngStream& rng) {
    trajectories_.fetch_add(1, std::memory_order_relaxed);
    return diffusion_score(cfg_, rng);
}

double DiffusionSampler::sample_above(double bound, Strictness strictness, RngStream& rng) {
    const ConditionalDraw d = diffusion_conditional(cfg_, bound, strictness, rng);
    trajectories_.fetch_add(d.trajectories, std::memory_order_relaxed);
    return d.score;
}

}  // namespace splitwalk
