#pragma once

/// Probability estimators built from merged walk output, and the variance
/// expressions that go with them. Products are accumulated as log-sums.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "splitwalk/rle.hpp"

namespace splitwalk {

enum class EstimatorKind { StrictMVUE, NonStrictMVUE, PurePoisson, CrudeMC };

const char* to_string(EstimatorKind kind) noexcept;

struct EstimateReport {
    double p_hat = 0.0;
    EstimatorKind kind = EstimatorKind::NonStrictMVUE;
    std::uint64_t n = 0;
    std::uint64_t total_count = 0;
    std::optional<RunLengthEncoding> runs;
    std::optional<double> standard_error;  // crude Monte Carlo only
};

/// prod_i (N-1)/(N-1+r_i)
EstimateReport estimate_nonstrict(const RunLengthEncoding& r, std::uint64_t n);

/// prod_i (1 - r_i/N); exactly 0 when some r_i == N.
EstimateReport estimate_strict(const RunLengthEncoding& r, std::uint64_t n);

/// (1 - 1/N)^M
EstimateReport estimate_pure_poisson(std::uint64_t total_pure_poisson, std::uint64_t n);

/// (N-1)/(N-1+T): unbiased for the success probability of N geometric draws
/// summing to T.
double mvue_geometric(std::uint64_t t, std::uint64_t n);

/// 1 - S/N
double mvue_bernoulli(std::uint64_t s, std::uint64_t n);

/// p^2 (p^{-1/N} - 1)
double variance_continuous(double p, std::uint64_t n);

/// (Delta (N-1) + 1) / (N Delta^{1-1/N}); >= 1 with equality at Delta = 1.
double strict_variance_factor(double delta, std::uint64_t n);

/// p^2 (p^{-1/N} prod g(Delta_d, N) - 1)
double variance_strict(double p, std::span<const double> deltas, std::uint64_t n);

struct VarianceBounds {
    double lower;
    double upper;
};

/// Sandwich for the non-strict MVUE variance; requires N >= 3.
VarianceBounds variance_bounds_nonstrict(double p, double p_pois, std::uint64_t num_atoms,
                                         std::uint64_t n);

/// Upper bound on Var/p^2 for a purely discrete score: ((N-1)/(N-2))^#atoms - 1.
double cv2_bound_discrete(std::uint64_t num_atoms, std::uint64_t n);

/// 1 - (1 - 1/N)^M
double empirical_cdf(std::uint64_t count_below, std::uint64_t n);

/// Step function x0 -> 1 - (1-1/N)^{#states <= x0} over merged states of N
/// walks run to `level`.
class EmpiricalCdf {
public:
    EmpiricalCdf(std::vector<double> merged_sorted, std::uint64_t n, double level);

    double operator()(double x0) const;
    std::uint64_t count_below(double x0) const;

private:
    std::vector<double> merged_;
    std::uint64_t n_;
    double level_;
};

/// Sample mean of 0/1 indicators with its binomial standard error.
EstimateReport crude_monte_carlo(std::span<const std::uint8_t> indicators);

}  // namespace splitwalk
