#include "splitwalk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splitwalk/errors.hpp"

namespace splitwalk {

namespace {

void require_n(std::uint64_t n, std::uint64_t min = 2) {
    if (n < min) {
        throw ParameterError("N must be at least " + std::to_string(min) + ", got " + std::to_string(n));
    }
}

void require_probability(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("probability must lie in (0, 1], got " + std::to_string(p));
}

double dn(std::uint64_t v) { return static_cast<double>(v); }

}  // namespace

const char* to_string(EstimatorKind kind) noexcept {
    switch (kind) {
        case EstimatorKind::StrictMVUE: return "StrictMVUE";
        case EstimatorKind::NonStrictMVUE: return "NonStrictMVUE";
        case EstimatorKind::PurePoisson: return "PurePoisson";
        case EstimatorKind::CrudeMC: return "CrudeMC";
    }
    return "?";
}

RunLengthEncoding rle(std::span<const double> sorted) {
    RunLengthEncoding out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] < sorted[i - 1]) {
            throw UsageError("rle: input decreases at index " + std::to_string(i));
        }
        if (!out.runs.empty() && out.runs.back().value == sorted[i]) {
            ++out.runs.back().length;
        } else {
            out.runs.push_back({sorted[i], 1});
        }
    }
    return out;
}

RunLengthEncoding with_strict_counts(const RunLengthEncoding& r, const StrictCounts& counts) {
    RunLengthEncoding out = r;
    for (Run& run : out.runs) {
        if (auto it = counts.find(run.value); it != counts.end()) run.length = it->second;
    }
    return out;
}

EstimateReport estimate_nonstrict(const RunLengthEncoding& r, std::uint64_t n) {
    require_n(n);
    double log_p = 0.0;
    const double nm1 = dn(n - 1);
    for (const Run& run : r.runs) log_p -= std::log1p(dn(run.length) / nm1);
    return {std::exp(log_p), EstimatorKind::NonStrictMVUE, n, r.total(), r, std::nullopt};
}

EstimateReport estimate_strict(const RunLengthEncoding& r, std::uint64_t n) {
    require_n(n);
    double log_p = 0.0;
    bool zero = false;
    for (const Run& run : r.runs) {
        if (run.length > n) {
            throw InconsistentInputError("run length " + std::to_string(run.length) + " exceeds N = " +
                                         std::to_string(n));
        }
        if (run.length == n) zero = true;
        else log_p += std::log1p(-dn(run.length) / dn(n));
    }
    return {zero ? 0.0 : std::exp(log_p), EstimatorKind::StrictMVUE, n, r.total(), r, std::nullopt};
}

EstimateReport estimate_pure_poisson(std::uint64_t total_pure_poisson, std::uint64_t n) {
    require_n(n);
    const double p = std::exp(dn(total_pure_poisson) * std::log1p(-1.0 / dn(n)));
    return {p, EstimatorKind::PurePoisson, n, total_pure_poisson, std::nullopt, std::nullopt};
}

double mvue_geometric(std::uint64_t t, std::uint64_t n) {
    require_n(n);
    return dn(n - 1) / (dn(n - 1) + dn(t));
}

double mvue_bernoulli(std::uint64_t s, std::uint64_t n) {
    require_n(n);
    if (s > n) throw InconsistentInputError("failure count exceeds N");
    return 1.0 - dn(s) / dn(n);
}

double variance_continuous(double p, std::uint64_t n) {
    require_probability(p);
    require_n(n);
    // p^{-1/N} - 1 = expm1(-log(p)/N), accurate for large N.
    return p * p * std::expm1(-std::log(p) / dn(n));
}

double strict_variance_factor(double delta, std::uint64_t n) {
    require_probability(delta);
    require_n(n);
    const double nd = dn(n);
    return (delta * (nd - 1.0) + 1.0) / (nd * std::pow(delta, 1.0 - 1.0 / nd));
}

double variance_strict(double p, std::span<const double> deltas, std::uint64_t n) {
    require_probability(p);
    require_n(n);
    double log_factor = -std::log(p) / dn(n);
    for (double d : deltas) log_factor += std::log(strict_variance_factor(d, n));
    return p * p * std::expm1(log_factor);
}

VarianceBounds variance_bounds_nonstrict(double p, double p_pois, std::uint64_t num_atoms,
                                         std::uint64_t n) {
    require_n(n, 3);
    require_probability(p);
    require_probability(p_pois);
    if (p > p_pois * (1.0 + 1e-12)) throw ParameterError("p must not exceed p_pois");
    const double base = -std::log(p_pois) / dn(n);
    const double atoms = dn(num_atoms) * std::log(dn(n - 1) / dn(n - 2));
    return {p * p * std::expm1(base), p * p * std::expm1(base + atoms)};
}

double cv2_bound_discrete(std::uint64_t num_atoms, std::uint64_t n) {
    require_n(n, 3);
    return std::expm1(dn(num_atoms) * std::log(dn(n - 1) / dn(n - 2)));
}

double empirical_cdf(std::uint64_t count_below, std::uint64_t n) {
    require_n(n);
    return -std::expm1(dn(count_below) * std::log1p(-1.0 / dn(n)));
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> merged_sorted, std::uint64_t n, double level)
    : merged_(std::move(merged_sorted)), n_(n), level_(level) {
    require_n(n);
    if (!std::is_sorted(merged_.begin(), merged_.end())) throw UsageError("EmpiricalCdf: states not sorted");
}

std::uint64_t EmpiricalCdf::count_below(double x0) const {
    if (x0 > level_) throw UsageError("EmpiricalCdf: query above the walk level");
    return static_cast<std::uint64_t>(std::upper_bound(merged_.begin(), merged_.end(), x0) - merged_.begin());
}

double EmpiricalCdf::operator()(double x0) const { return empirical_cdf(count_below(x0), n_); }

EstimateReport crude_monte_carlo(std::span<const std::uint8_t> indicators) {
    if (indicators.empty()) throw UsageError("crude_monte_carlo: no samples");
    std::uint64_t hits = 0;
    for (std::uint8_t b : indicators) hits += b != 0;
    const double n = dn(indicators.size());
    const double p = dn(hits) / n;
    return {p, EstimatorKind::CrudeMC, indicators.size(), hits, std::nullopt, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace splitwalk
