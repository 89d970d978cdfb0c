#include "splitwalk/walk.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <string>
#include <thread>

#include "splitwalk/errors.hpp"

namespace splitwalk {

namespace {

constexpr std::uint64_t kAuxStream = 1;

struct WalkStart {
    RngStream rng;
    RngStream aux;
    double first = 0.0;
    double first_aux = 0.0;
};

WalkStart start_walk(ConditionalSampler& sampler, WalkMode mode, RngStream rng) {
    WalkStart s{rng, rng.substream(kAuxStream)};
    s.first = sampler.sample_initial(s.rng);
    if (mode == WalkMode::NonStrictWithPurePoisson) s.first_aux = s.aux.uniform();
    return s;
}

WalkRecord finish_walk(ConditionalSampler& sampler, double level, WalkMode mode, WalkStart s,
                       std::uint64_t max_draws, std::size_t walk_index) {
    WalkRecord rec;
    rec.level = level;
    rec.mode = mode;
    rec.draws = 1;
    const bool pure_poisson = mode == WalkMode::NonStrictWithPurePoisson;
    const Strictness strictness = mode == WalkMode::Strict ? Strictness::Strict : Strictness::NonStrict;
    std::uint64_t pp = 0;

    auto next = [&](double bound) {
        if (rec.draws >= max_draws) {
            throw RunawayWalkError("walk " + std::to_string(walk_index) + " exceeded " +
                                       std::to_string(max_draws) +
                                       " conditional draws; P(X > level) may be zero",
                                   walk_index);
        }
        ++rec.draws;
        return sampler.sample_above(bound, strictness, s.rng);
    };

    double x = s.first;
    double u = s.first_aux;
    while (x <= level) {
        rec.states.push_back(x);
        ++pp;
        // Tie run: the accepted uniform only moves on a record.
        double record_u = u;
        double y = next(x);
        double v = pure_poisson ? s.aux.uniform() : 0.0;
        while (y == x) {
            rec.states.push_back(y);
            if (pure_poisson && v > record_u) {
                ++pp;
                record_u = v;
            }
            y = next(x);
            v = pure_poisson ? s.aux.uniform() : 0.0;
        }
        x = y;
        u = v;
    }
    rec.count = rec.states.size();
    if (pure_poisson) rec.pure_poisson_count = pp;
    return rec;
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
}

}  // namespace

const char* to_string(WalkMode mode) noexcept {
    switch (mode) {
        case WalkMode::Strict: return "Strict";
        case WalkMode::NonStrict: return "NonStrict";
        case WalkMode::NonStrictWithPurePoisson: return "NonStrictWithPurePoisson";
    }
    return "?";
}

WalkRecord run_walk(ConditionalSampler& sampler, double level, WalkMode mode, RngStream rng,
                    std::uint64_t max_draws) {
    return finish_walk(sampler, level, mode, start_walk(sampler, mode, rng), max_draws, 0);
}

std::vector<WalkRecord> run_batch(ConditionalSampler& sampler, double level, WalkMode mode,
                                  std::size_t n, std::uint64_t seed, std::size_t parallelism,
                                  std::uint64_t max_draws) {
    if (n < 2) throw ParameterError("a batch needs at least 2 walks, got " + std::to_string(n));
    if (sampler.shares_state()) parallelism = 1;
    sampler.begin_batch();

    std::vector<std::optional<WalkStart>> starts(n);
    std::vector<WalkRecord> records(n);
    std::vector<std::exception_ptr> errors(n);

    parallel_for(n, parallelism, [&](std::size_t i) {
        try {
            starts[i] = start_walk(sampler, mode, RngStream(seed, i));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    parallel_for(n, parallelism, [&](std::size_t i) {
        try {
            records[i] = finish_walk(sampler, level, mode, *starts[i], max_draws, i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return records;
}

MergedStates merge_states(const std::vector<WalkRecord>& records) {
    MergedStates out;
    if (records.empty()) return out;
    const double level = records.front().level;
    const WalkMode mode = records.front().mode;
    const bool pp = records.front().pure_poisson_count.has_value();
    std::uint64_t pp_total = 0;
    for (const WalkRecord& r : records) {
        if (r.level != level || r.mode != mode) {
            throw UsageError("merge_states: records mix levels or walk modes");
        }
        out.merged.insert(out.merged.end(), r.states.begin(), r.states.end());
        out.total_count += r.count;
        if (pp) pp_total += r.pure_poisson_count.value_or(0);
    }
    std::sort(out.merged.begin(), out.merged.end());
    if (pp) out.total_pure_poisson = pp_total;
    return out;
}

StrictCounts derive_strict_counts(const std::vector<WalkRecord>& records) {
    // Value -> (occurrences, walks visiting); states are sorted within a walk.
    std::map<double, std::pair<std::uint64_t, std::uint64_t>> seen;
    for (const WalkRecord& r : records) {
        for (std::size_t i = 0; i < r.states.size(); ++i) {
            auto& [occurrences, walks] = seen[r.states[i]];
            ++occurrences;
            if (i == 0 || r.states[i - 1] != r.states[i]) ++walks;
        }
    }
    StrictCounts out;
    for (const auto& [value, c] : seen) {
        if (c.first >= 2) out.emplace(value, c.second);
    }
    return out;
}

std::uint64_t derived_strict_total(const std::vector<WalkRecord>& records) {
    std::uint64_t total = 0;
    for (const WalkRecord& r : records) {
        for (std::size_t i = 0; i < r.states.size(); ++i) {
            if (i == 0 || r.states[i - 1] != r.states[i]) ++total;
        }
    }
    return total;
}

}  // namespace splitwalk
