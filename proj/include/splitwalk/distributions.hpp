#pragma once

/// Elementary laws used by the walk engine and the exact counting laws of the
/// strict and non-strict increasing random walks.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "splitwalk/rng.hpp"

namespace splitwalk {

struct Uniform01 {};
struct Bernoulli {
    double p;  // probability of 1
};
/// Number of failures before the first success.
struct Geometric {
    double p;  // success probability, in (0, 1]
};
struct Poisson {
    double rate;
};

using DistSpec = std::variant<Uniform01, Bernoulli, Geometric, Poisson>;
using Variate = std::variant<double, std::uint64_t>;

bool draw_bernoulli(double p, RngStream& rng);
std::uint64_t draw_geometric(double p, RngStream& rng);
/// Inversion below rate 10, PTRS transformed rejection above.
std::uint64_t draw_poisson(double rate, RngStream& rng);

/// One variate of `spec`. Uniform01 yields a double, the others a count.
Variate draw(const DistSpec& spec, RngStream& rng);

enum class CountKind { NonStrict, Strict };

/// Law of the number of walk states below a level:
///   Poisson(poisson_rate) + sum over atoms of Geometric(delta)  (NonStrict)
///   Poisson(poisson_rate) + sum over atoms of Bernoulli(1-delta) (Strict)
struct CountLawSpec {
    double poisson_rate = 0.0;
    std::vector<double> atoms;  // ratios P(X > d) / P(X >= d), each in (0, 1]
    CountKind kind = CountKind::NonStrict;

    /// Law of the sum of `n` iid copies (rate scaled, atoms repeated).
    CountLawSpec batch(std::size_t n) const;
};

/// Builds the law for a level with exceedance probability `p_x` and atom
/// ratios `deltas`; the Poisson rate is -log(p_x / prod(deltas)).
CountLawSpec make_count_law(double p_x, std::span<const double> deltas, CountKind kind);

void validate(const CountLawSpec& law);

/// Exact P(M = k) by discrete convolution.
double count_law_pmf(const CountLawSpec& law, std::uint64_t k);

/// Exact P(M = k) for k = 0..last.
std::vector<double> count_law_prefix(const CountLawSpec& law, std::size_t last);

/// PMF table from 0 up to the first index where the remaining mass drops
/// below `tail_mass`. Entries are exact partial convolutions, so the only
/// error is the omitted tail.
std::vector<double> count_law_table(const CountLawSpec& law, double tail_mass = 1e-12);

struct Moments {
    double mean;
    double variance;
};

Moments count_law_moments(const CountLawSpec& law);

/// Log of the Poisson PMF; finite for every rate > 0 and k.
double poisson_log_pmf(double rate, std::uint64_t k);

}  // namespace splitwalk
