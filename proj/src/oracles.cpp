#include "splitwalk/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "splitwalk/errors.hpp"
#include "splitwalk/simd/kernels.hpp"

namespace splitwalk {

std::uint64_t brute_force_count(const SatProblem& problem) {
    if (problem.n > kMaxBruteForceVars) {
        throw ParameterError("brute_force_count: " + std::to_string(problem.n) + " variables exceeds the 2^" +
                             std::to_string(kMaxBruteForceVars) + " enumeration budget");
    }
    return simd::count_models(problem.flatten(), 0, std::uint64_t{1} << problem.n);
}

GofResult chisq_gof(std::span<const std::uint64_t> samples, const CountLawSpec& law) {
    const std::uint64_t max_obs = samples.empty() ? 0 : *std::max_element(samples.begin(), samples.end());
    std::vector<double> pmf = count_law_table(law);
    // Observations beyond the table get their own exact entries.
    if (pmf.size() <= max_obs) pmf = count_law_prefix(law, static_cast<std::size_t>(max_obs));
    return chisq_gof(samples, std::span<const double>(pmf));
}

GofResult chisq_gof(std::span<const std::uint64_t> samples, std::span<const double> pmf) {
    if (samples.size() < 1000) {
        throw UsageError("chisq_gof needs at least 1000 samples, got " + std::to_string(samples.size()));
    }
    const double n = static_cast<double>(samples.size());
    const std::size_t K = pmf.size();
    std::vector<double> observed(K + 1, 0.0);  // observed[K] = upper tail
    for (std::uint64_t s : samples) observed[std::min<std::uint64_t>(s, K)] += 1.0;

    std::vector<double> remaining(K + 1);  // mass strictly above k
    double cum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        cum += pmf[k];
        remaining[k] = std::max(0.0, 1.0 - cum);
    }

    GofResult r;
    GofBin cur{0, 0, 0.0, 0.0};
    for (std::size_t k = 0; k < K; ++k) {
        cur.last = k;
        cur.observed += observed[k];
        cur.expected += n * pmf[k];
        if (cur.expected >= 5.0 && n * remaining[k] >= 5.0) {
            r.bins.push_back(cur);
            cur = {k + 1, k + 1, 0.0, 0.0};
        }
    }
    cur.last = std::numeric_limits<std::uint64_t>::max();
    cur.observed += observed[K];
    cur.expected += n * (K > 0 ? remaining[K - 1] : 1.0);
    if (cur.expected < 5.0 && !r.bins.empty()) {
        r.bins.back().last = cur.last;
        r.bins.back().observed += cur.observed;
        r.bins.back().expected += cur.expected;
    } else {
        r.bins.push_back(cur);
    }
    if (r.bins.size() < 2) throw ParameterError("chisq_gof: degenerate law, a single pooled bin");

    for (const GofBin& b : r.bins) {
        const double d = b.observed - b.expected;
        r.statistic += d * d / b.expected;
    }
    r.dof = r.bins.size() - 1;
    boost::math::chi_squared_distribution<double> chi2(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(chi2, r.statistic));
    return r;
}

double negbin_expectation(const std::function<double(std::uint64_t)>& fn, std::uint64_t n, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("negbin_expectation: p must lie in (0, 1]");
    if (n < 1) throw ParameterError("negbin_expectation: n must be at least 1");
    if (p == 1.0) return fn(0);
    const double nd = static_cast<double>(n);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double mean = nd * (1.0 - p) / p;
    double cum = 0.0;
    double sum = 0.0;
    for (std::uint64_t t = 0;; ++t) {
        const double td = static_cast<double>(t);
        const double w = std::exp(std::lgamma(td + nd) - std::lgamma(td + 1.0) - std::lgamma(nd) + nd * log_p + td * log_q);
        sum += w * fn(t);
        cum += w;
        if (td > mean && 1.0 - cum < 1e-12) break;
        if (t > 100'000'000) throw SamplingError("negbin_expectation: tail did not converge");
    }
    return sum;
}

namespace {

double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::fabs(term) < 1e-16 * std::fabs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw UsageError("ks_test: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

double binomial_test(std::uint64_t k, std::uint64_t n, double p) {
    if (k > n) throw UsageError("binomial_test: k exceeds n");
    boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
    const double pk = boost::math::pdf(dist, static_cast<double>(k));
    double total = 0.0;
    for (std::uint64_t j = 0; j <= n; ++j) {
        const double pj = boost::math::pdf(dist, static_cast<double>(j));
        if (pj <= pk * (1.0 + 1e-7)) total += pj;
    }
    return std::min(1.0, total);
}

}  // namespace splitwalk
