#pragma once

/// Independent references: exhaustive model counting, chi-square and
/// Kolmogorov-Smirnov goodness of fit, exact negative binomial expectations.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "splitwalk/distributions.hpp"
#include "splitwalk/targets/sat.hpp"

namespace splitwalk {

inline constexpr int kMaxBruteForceVars = 26;

/// Exact number of satisfying assignments by enumerating all 2^n.
std::uint64_t brute_force_count(const SatProblem& problem);

struct GofBin {
    std::uint64_t first;  // support points first..last pooled into this bin
    std::uint64_t last;   // UINT64_MAX for the open upper tail
    double observed;
    double expected;
};

struct GofResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::vector<GofBin> bins;
};

/// Pearson chi-square of observed counts against count_law_pmf. Adjacent
/// support points are pooled until every bin expects at least 5.
GofResult chisq_gof(std::span<const std::uint64_t> samples, const CountLawSpec& law);

/// Same test against an arbitrary PMF table (upper tail = 1 - sum).
GofResult chisq_gof(std::span<const std::uint64_t> samples, std::span<const double> pmf);

/// sum_t fn(t) P(T = t), T ~ NegBin(n, p) counting failures before the n-th
/// success, truncated once the remaining mass is below 1e-12.
double negbin_expectation(const std::function<double(std::uint64_t)>& fn, std::uint64_t n, double p);

struct KsResult {
    double statistic;
    double p_value;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, using the
/// asymptotic Kolmogorov distribution with Stephens' small-sample correction.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sided exact binomial test p-value for k successes in n trials.
double binomial_test(std::uint64_t k, std::uint64_t n, double p);

}  // namespace splitwalk
