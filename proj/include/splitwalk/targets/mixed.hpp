#pragma once

/// Mixed continuous/discrete score laws with exact conditional sampling.

#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "splitwalk/rng.hpp"
#include "splitwalk/walk.hpp"

namespace splitwalk {

struct UniformBase {
    double lo = 0.0;
    double hi = 1.0;
};

struct ExponentialBase {
    double rate = 1.0;
};

using ContinuousBase = std::variant<UniformBase, ExponentialBase>;

struct Atom {
    double location;
    double mass;
};

/// continuous_weight * base + sum of point masses. The CDF jumps by exactly
/// `mass` at each atom location.
class MixedDistribution {
public:
    /// Throws ParameterError unless weights sum to 1 (1e-12) and atom
    /// locations are distinct.
    MixedDistribution(ContinuousBase base, double continuous_weight, std::vector<Atom> atoms);

    const ContinuousBase& base() const noexcept { return base_; }
    double continuous_weight() const noexcept { return weight_; }
    /// Sorted by location.
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }

    double prob_greater(double t) const;  // P(X > t)
    double prob_at_least(double t) const;  // P(X >= t)
    double cdf(double t) const { return 1.0 - prob_greater(t); }

private:
    ContinuousBase base_;
    double weight_;
    std::vector<Atom> atoms_;
};

struct MixedTruth {
    double p_x;                                      // P(X > x)
    std::vector<std::pair<double, double>> atoms;    // (d, Delta_d) for atoms d <= x
    double p_pois;                                   // p_x / prod Delta_d

    std::vector<double> deltas() const;
};

MixedTruth mixed_truth(const MixedDistribution& dist, double x);

inline constexpr double kNoBound = -std::numeric_limits<double>::infinity();

/// Inverse-CDF draw from the law renormalized above `bound` (> or >=).
/// Throws SamplingError when that region carries no mass.
double mixed_sample_conditional(const MixedDistribution& dist, double bound, Strictness strictness,
                                RngStream& rng);

class MixedSampler final : public ConditionalSampler {
public:
    explicit MixedSampler(MixedDistribution dist) : dist_(std::move(dist)) {}

    double sample_initial(RngStream& rng) override {
        return mixed_sample_conditional(dist_, kNoBound, Strictness::NonStrict, rng);
    }
    double sample_above(double bound, Strictness strictness, RngStream& rng) override {
        return mixed_sample_conditional(dist_, bound, strictness, rng);
    }

    const MixedDistribution& distribution() const noexcept { return dist_; }

private:
    MixedDistribution dist_;
};

}  // namespace splitwalk
