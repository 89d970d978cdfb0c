#include "splitwalk/targets/mixed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splitwalk/errors.hpp"

namespace splitwalk {

namespace {

// P(base > t)
double base_survival(const ContinuousBase& base, double t) {
    if (const auto* u = std::get_if<UniformBase>(&base)) {
        if (t < u->lo) return 1.0;
        if (t >= u->hi) return 0.0;
        return (u->hi - t) / (u->hi - u->lo);
    }
    const auto& e = std::get<ExponentialBase>(base);
    return t < 0.0 ? 1.0 : std::exp(-e.rate * t);
}

// Smallest t with P(base > t) = s, for s in (0, 1].
double base_inverse_survival(const ContinuousBase& base, double s) {
    if (const auto* u = std::get_if<UniformBase>(&base)) return u->hi - s * (u->hi - u->lo);
    return -std::log(s) / std::get<ExponentialBase>(base).rate;
}

}  // namespace

MixedDistribution::MixedDistribution(ContinuousBase base, double continuous_weight, std::vector<Atom> atoms)
    : base_(base), weight_(continuous_weight), atoms_(std::move(atoms)) {
    if (const auto* u = std::get_if<UniformBase>(&base_); u && !(u->lo < u->hi)) {
        throw ParameterError("uniform base needs lo < hi");
    }
    if (const auto* e = std::get_if<ExponentialBase>(&base_); e && !(e->rate > 0.0)) {
        throw ParameterError("exponential base needs rate > 0");
    }
    if (!(weight_ >= 0.0 && weight_ <= 1.0)) throw ParameterError("continuous weight must lie in [0, 1]");
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    double total = weight_;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (!(atoms_[i].mass > 0.0) || !std::isfinite(atoms_[i].location)) {
            throw ParameterError("atom masses must be positive and locations finite");
        }
        if (i > 0 && atoms_[i].location == atoms_[i - 1].location) {
            throw ParameterError("duplicate atom location " + std::to_string(atoms_[i].location));
        }
        total += atoms_[i].mass;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw ParameterError("masses and continuous weight sum to " + std::to_string(total) + ", not 1");
    }
}

double MixedDistribution::prob_greater(double t) const {
    double p = weight_ * base_survival(base_, t);
    for (const Atom& a : atoms_) {
        if (a.location > t) p += a.mass;
    }
    return p;
}

double MixedDistribution::prob_at_least(double t) const {
    double p = weight_ * base_survival(base_, t);
    for (const Atom& a : atoms_) {
        if (a.location >= t) p += a.mass;
    }
    return p;
}

std::vector<double> MixedTruth::deltas() const {
    std::vector<double> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(a.second);
    return out;
}

MixedTruth mixed_truth(const MixedDistribution& dist, double x) {
    MixedTruth t{dist.prob_greater(x), {}, 0.0};
    double log_prod = 0.0;
    for (const Atom& a : dist.atoms()) {
        if (a.location > x) break;
        const double delta = dist.prob_greater(a.location) / dist.prob_at_least(a.location);
        t.atoms.emplace_back(a.location, delta);
        log_prod += std::log(delta);
    }
    t.p_pois = t.p_x > 0.0 ? std::exp(std::log(t.p_x) - log_prod) : 0.0;
    return t;
}

double mixed_sample_conditional(const MixedDistribution& dist, double bound, Strictness strictness,
                                RngStream& rng) {
    const bool strict = strictness == Strictness::Strict;
    const double mass = strict ? dist.prob_greater(bound) : dist.prob_at_least(bound);
    if (!(mass > 0.0)) {
        throw SamplingError("no probability mass " + std::string(strict ? "above " : "at or above ") +
                            std::to_string(bound));
    }
    const double w = dist.continuous_weight();
    for (;;) {
        // Walk the conditional CDF left to right: continuous stretch, atom, ...
        double target = rng.uniform() * mass;
        double surv = base_survival(dist.base(), bound);
        double result = std::numeric_limits<double>::quiet_NaN();
        for (const Atom& a : dist.atoms()) {
            if (a.location < bound || (strict && a.location == bound)) continue;
            const double next_surv = base_survival(dist.base(), a.location);
            const double stretch = w * (surv - next_surv);
            if (target < stretch) {
                result = base_inverse_survival(dist.base(), surv - target / w);
                break;
            }
            target -= stretch;
            if (target < a.mass) {
                result = a.location;
                break;
            }
            target -= a.mass;
            surv = next_surv;
        }
        if (std::isnan(result)) {
            if (!(w > 0.0 && surv > 0.0)) continue;  // rounding overshoot past the last atom
            const double s = std::clamp(surv - target / w, surv * 0x1.0p-52, surv);
            result = base_inverse_survival(dist.base(), s);
        }
        // Rounding at the bound itself is the only way to violate the domain.
        if (strict ? result > bound : result >= bound) return result;
    }
}

}  // namespace splitwalk
