#pragma once

/// Two-dimensional double-well diffusion, discretized by Euler-Maruyama.
///
///   V(u1, u2) = -(u1^2/2 - u1^4/4) - b (u2^2/2 - u2^4/4) + (a/2) u1^2 u2^2
///   U_{t+dt}  = U_t - grad V(U_t) dt + sqrt(2 dt / beta) xi
///
/// The score of a trajectory is the largest reaction coordinate
/// Phi(u) = (1 + u1) / 2 seen before it enters A = {Phi <= 0} or
/// B = {Phi >= 1}. With a coarse step a trajectory can fall into A at once,
/// so X = Phi(u0) carries positive mass.

#include <array>
#include <atomic>
#include <cstdint>

#include "splitwalk/rng.hpp"
#include "splitwalk/simd/kernels.hpp"
#include "splitwalk/walk.hpp"

namespace splitwalk {

struct DiffusionConfig {
    double a = 0.6;
    double b = 0.3;
    double beta = 10.0;
    double dt = 1.0;
    std::array<double, 2> u0{-0.9, 0.0};
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t rejection_cap = 1'000'000;

    void validate() const;
    simd::DiffusionParams kernel_params() const;
};

inline double reaction_coordinate(double u1) { return 0.5 * (1.0 + u1); }

/// One unconditional trajectory score.
double diffusion_score(const DiffusionConfig& cfg, RngStream& rng);

struct ConditionalDraw {
    double score;
    std::uint64_t trajectories;  // simulated up to and including the accepted one
};

/// Acceptance-rejection: fresh trajectories from u0 until the score clears
/// `bound`. Throws SamplingError after cfg.rejection_cap trajectories.
ConditionalDraw diffusion_conditional(const DiffusionConfig& cfg, double bound, Strictness strictness,
                                      RngStream& rng);

class DiffusionSampler final : public ConditionalSampler {
public:
    explicit DiffusionSampler(DiffusionConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    double sample_initial(RngStream& rng) override;
    double sample_above(double bound, Strictness strictness, RngStream& rng) override;

    const DiffusionConfig& config() const noexcept { return cfg_; }
    /// Trajectories simulated since construction (all threads).
    std::uint64_t trajectories() const noexcept { return trajectories_.load(std::memory_order_relaxed); }

private:
    DiffusionConfig cfg_;
    std::atomic<std::uint64_t> trajectories_{0};
};

}  // namespace splitwalk
