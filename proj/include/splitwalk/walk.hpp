#pragma once

/// Increasing random walks over a conditionally samplable score.
///
/// A walk starts from an unconditional draw and repeatedly resamples above
/// its current state until it leaves (-inf, level]. Every state <= level is
/// recorded; the number of recorded states is the counting variable whose
/// law drives all estimators.

#include <cstdint>
#include <optional>
#include <vector>

#include "splitwalk/rle.hpp"
#include "splitwalk/rng.hpp"

namespace splitwalk {

enum class Strictness { Strict, NonStrict };

/// Source of draws from mu(. | X > b) or mu(. | X >= b).
///
/// Implementations are either pure given the stream (safe to share between
/// threads) or report `shares_state()`, in which case batches run serially.
class ConditionalSampler {
public:
    virtual ~ConditionalSampler() = default;

    virtual double sample_initial(RngStream& rng) = 0;
    /// Result is > bound (Strict) or >= bound (NonStrict).
    virtual double sample_above(double bound, Strictness strictness, RngStream& rng) = 0;

    virtual bool shares_state() const noexcept { return false; }
    /// Called by run_batch before any walk starts.
    virtual void begin_batch() {}
};

enum class WalkMode { Strict, NonStrict, NonStrictWithPurePoisson };

const char* to_string(WalkMode mode) noexcept;

struct WalkRecord {
    std::vector<double> states;  // every state <= level, non-decreasing
    std::uint64_t count = 0;     // == states.size()
    std::optional<std::uint64_t> pure_poisson_count;
    double level = 0.0;
    WalkMode mode = WalkMode::NonStrict;
    std::uint64_t draws = 0;  // sampler calls, including the exiting one

    friend bool operator==(const WalkRecord&, const WalkRecord&) = default;
};

inline constexpr std::uint64_t kDefaultMaxDraws = 10'000'000;

/// Runs one walk up to `level`.
///
/// In NonStrictWithPurePoisson mode each draw carries an auxiliary uniform
/// taken from `rng.substream(1)`, so the states match a NonStrict walk on
/// the same stream. Within a run of tied states the pure-Poisson count is
/// incremented only when the fresh uniform beats the last accepted one.
WalkRecord run_walk(ConditionalSampler& sampler, double level, WalkMode mode, RngStream rng,
                    std::uint64_t max_draws = kDefaultMaxDraws);

/// N walks, walk i on RngStream(seed, i). All initial states are drawn before
/// any walk advances, which seeds shared-population samplers. The result does
/// not depend on `parallelism`.
std::vector<WalkRecord> run_batch(ConditionalSampler& sampler, double level, WalkMode mode,
                                  std::size_t n, std::uint64_t seed, std::size_t parallelism = 1,
                                  std::uint64_t max_draws = kDefaultMaxDraws);

struct MergedStates {
    std::vector<double> merged;  // ascending
    std::uint64_t total_count = 0;
    std::optional<std::uint64_t> total_pure_poisson;
};

MergedStates merge_states(const std::vector<WalkRecord>& records);

/// For each value repeated in the merged sequence of non-strict walks, the
/// number of walks that visited it: the Bernoulli counts a strict walk would
/// have produced on the same draws.
StrictCounts derive_strict_counts(const std::vector<WalkRecord>& records);

/// Total count the strict walks embedded in non-strict records would have.
std::uint64_t derived_strict_total(const std::vector<WalkRecord>& records);

}  // namespace splitwalk
