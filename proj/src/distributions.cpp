#include "splitwalk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "splitwalk/errors.hpp"

namespace splitwalk {

namespace {

void check_probability(double p, bool allow_zero, const char* what) {
    const bool ok = std::isfinite(p) && p <= 1.0 && (allow_zero ? p >= 0.0 : p > 0.0);
    if (!ok) throw ParameterError(std::string(what) + " parameter out of range: " + std::to_string(p));
}

std::uint64_t poisson_inversion(double rate, RngStream& rng) {
    const double u = rng.uniform();
    double term = std::exp(-rate);
    double cdf = term;
    std::uint64_t k = 0;
    // Rounding can leave cdf slightly below 1; the bound only matters then.
    while (u > cdf && k < 1000) {
        ++k;
        term *= rate / static_cast<double>(k);
        cdf += term;
    }
    return k;
}

// Hörmann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS.
std::uint64_t poisson_ptrs(double rate, RngStream& rng) {
    const double slam = std::sqrt(rate);
    const double loglam = std::log(rate);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -rate + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

// h = f * Geometric(delta):  h[k] = delta f[k] + (1 - delta) h[k-1]
void convolve_geometric(std::vector<double>& f, double delta) {
    double prev = 0.0;
    for (double& v : f) {
        prev = delta * v + (1.0 - delta) * prev;
        v = prev;
    }
}

// h = f * Bernoulli(1 - delta):  h[k] = delta f[k] + (1 - delta) f[k-1]
void convolve_bernoulli(std::vector<double>& f, double delta) {
    for (std::size_t k = f.size(); k-- > 0;) {
        f[k] = delta * f[k] + (k > 0 ? (1.0 - delta) * f[k - 1] : 0.0);
    }
}

std::vector<double> tabulate(const CountLawSpec& law, std::size_t last) {
    std::vector<double> f(last + 1, 0.0);
    if (law.poisson_rate == 0.0) {
        f[0] = 1.0;
    } else {
        for (std::size_t k = 0; k <= last; ++k) f[k] = std::exp(poisson_log_pmf(law.poisson_rate, k));
    }
    for (double delta : law.atoms) {
        if (delta == 1.0) continue;
        if (law.kind == CountKind::NonStrict) {
            convolve_geometric(f, delta);
        } else {
            convolve_bernoulli(f, delta);
        }
    }
    return f;
}

}  // namespace

bool draw_bernoulli(double p, RngStream& rng) {
    check_probability(p, true, "Bernoulli");
    return rng.uniform() < p;
}

std::uint64_t draw_geometric(double p, RngStream& rng) {
    check_probability(p, false, "Geometric");
    if (p == 1.0) return 0;
    return static_cast<std::uint64_t>(std::floor(std::log(rng.uniform()) / std::log1p(-p)));
}

std::uint64_t draw_poisson(double rate, RngStream& rng) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw ParameterError("Poisson rate out of range: " + std::to_string(rate));
    }
    if (rate == 0.0) return 0;
    return rate < 10.0 ? poisson_inversion(rate, rng) : poisson_ptrs(rate, rng);
}

Variate draw(const DistSpec& spec, RngStream& rng) {
    struct Visitor {
        RngStream& rng;
        Variate operator()(Uniform01) const { return rng.uniform(); }
        Variate operator()(Bernoulli b) const {
            return static_cast<std::uint64_t>(draw_bernoulli(b.p, rng) ? 1 : 0);
        }
        Variate operator()(Geometric g) const { return draw_geometric(g.p, rng); }
        Variate operator()(Poisson p) const { return draw_poisson(p.rate, rng); }
    };
    return std::visit(Visitor{rng}, spec);
}

CountLawSpec CountLawSpec::batch(std::size_t n) const {
    CountLawSpec out;
    out.kind = kind;
    out.poisson_rate = poisson_rate * static_cast<double>(n);
    out.atoms.reserve(atoms.size() * n);
    for (std::size_t i = 0; i < n; ++i) out.atoms.insert(out.atoms.end(), atoms.begin(), atoms.end());
    return out;
}

CountLawSpec make_count_law(double p_x, std::span<const double> deltas, CountKind kind) {
    check_probability(p_x, false, "exceedance probability");
    double log_prod = 0.0;
    for (double d : deltas) {
        check_probability(d, false, "atom ratio");
        log_prod += std::log(d);
    }
    CountLawSpec law;
    // Rounding can push the rate a hair below zero when p_x == prod(deltas).
    law.poisson_rate = std::max(0.0, -(std::log(p_x) - log_prod));
    law.atoms.assign(deltas.begin(), deltas.end());
    law.kind = kind;
    return law;
}

void validate(const CountLawSpec& law) {
    if (!(law.poisson_rate >= 0.0) || !std::isfinite(law.poisson_rate)) {
        throw ParameterError("Poisson rate out of range: " + std::to_string(law.poisson_rate));
    }
    for (double d : law.atoms) check_probability(d, false, "atom ratio");
}

double poisson_log_pmf(double rate, std::uint64_t k) {
    if (rate == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const double kd = static_cast<double>(k);
    return kd * std::log(rate) - rate - std::lgamma(kd + 1.0);
}

double count_law_pmf(const CountLawSpec& law, std::uint64_t k) {
    validate(law);
    return tabulate(law, static_cast<std::size_t>(k)).back();
}

std::vector<double> count_law_prefix(const CountLawSpec& law, std::size_t last) {
    validate(law);
    return tabulate(law, last);
}

std::vector<double> count_law_table(const CountLawSpec& law, double tail_mass) {
    validate(law);
    if (!(tail_mass >= 1e-14)) throw ParameterError("tail mass below rounding resolution");
    const Moments m = count_law_moments(law);
    auto last = static_cast<std::size_t>(m.mean + 12.0 * std::sqrt(m.variance) + 16.0);
    for (;;) {
        std::vector<double> f = tabulate(law, last);
        double cum = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            cum += f[k];
            if (1.0 - cum < tail_mass) {
                f.resize(k + 1);
                return f;
            }
        }
        last *= 2;
    }
}

Moments count_law_moments(const CountLawSpec& law) {
    validate(law);
    Moments m{law.poisson_rate, law.poisson_rate};
    for (double d : law.atoms) {
        if (law.kind == CountKind::NonStrict) {
            m.mean += 1.0 / d - 1.0;
            m.variance += (1.0 / d) * (1.0 / d - 1.0);
        } else {
            m.mean += 1.0 - d;
            m.variance += d * (1.0 - d);
        }
    }
    return m;
}

}  // namespace splitwalk
