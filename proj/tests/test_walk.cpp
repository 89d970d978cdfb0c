#include <doctest.h>

#include <cmath>

#include "splitwalk/errors.hpp"
#include "splitwalk/walk.hpp"
#include "support.hpp"

using namespace splitwalk;

TEST_CASE("uniform target at 1 - 1/e: mean count is 1") {
    MixedSampler s(test_support::uniform01());
    const double x = 1.0 - std::exp(-1.0);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) sum += static_cast<double>(run_walk(s, x, WalkMode::NonStrict, RngStream(9, i)).count);
    CHECK(std::fabs(sum / 1e4 - 1.0) < 0.04);
}

TEST_CASE("level below the support: empty walk") {
    MixedSampler s(test_support::uniform01());
    const WalkRecord r = run_walk(s, -1.0, WalkMode::Strict, RngStream(1, 0));
    CHECK(r.states.empty());
    CHECK(r.count == 0);
    CHECK(r.draws == 1);
}

TEST_CASE("mixture non-strict mean count") {
    MixedSampler s(test_support::mixture());
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 100000; ++i) sum += static_cast<double>(run_walk(s, 0.9, WalkMode::NonStrict, RngStream(21, i)).count);
    const double expected = -std::log(0.07 * 13.0 / 7.0) + 6.0 / 7.0;
    CHECK(expected == doctest::Approx(2.900).epsilon(1e-3));
    // Count sd is about 1.9, so 4 s.e. is about 0.024.
    CHECK(std::fabs(sum / 1e5 - expected) < 0.025);
}

TEST_CASE("walk records are non-decreasing, bounded by the level, and strict walks never tie") {
    MixedSampler s(test_support::mixture());
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const WalkRecord ns = run_walk(s, 0.9, WalkMode::NonStrictWithPurePoisson, RngStream(4, i));
        const WalkRecord st = run_walk(s, 0.9, WalkMode::Strict, RngStream(4, i));
        REQUIRE(ns.count == ns.states.size());
        REQUIRE(ns.pure_poisson_count.has_value());
        REQUIRE(*ns.pure_poisson_count <= ns.count);
        for (std::size_t k = 0; k < ns.states.size(); ++k) {
            REQUIRE(ns.states[k] <= 0.9);
            if (k) REQUIRE(ns.states[k - 1] <= ns.states[k]);
        }
        for (std::size_t k = 1; k < st.states.size(); ++k) REQUIRE(st.states[k - 1] < st.states[k]);
        CHECK_FALSE(st.pure_poisson_count.has_value());
    }
}

TEST_CASE("pure-Poisson tracking does not change the states") {
    MixedSampler s(test_support::mixture());
    for (std::uint64_t i = 0; i < 500; ++i) {
        const WalkRecord a = run_walk(s, 0.9, WalkMode::NonStrict, RngStream(8, i));
        const WalkRecord b = run_walk(s, 0.9, WalkMode::NonStrictWithPurePoisson, RngStream(8, i));
        REQUIRE(a.states == b.states);
    }
}

TEST_CASE("pure-Poisson count equals the count on a continuous target") {
    MixedSampler s(test_support::uniform01());
    for (std::uint64_t i = 0; i < 500; ++i) {
        const WalkRecord r = run_walk(s, 0.99, WalkMode::NonStrictWithPurePoisson, RngStream(2, i));
        REQUIRE(*r.pure_poisson_count == r.count);
    }
}

TEST_CASE("batches: size, determinism across parallelism, validation") {
    MixedSampler s(test_support::mixture());
    const auto one = run_batch(s, 0.9, WalkMode::NonStrictWithPurePoisson, 300, 77, 1);
    const auto eight = run_batch(s, 0.9, WalkMode::NonStrictWithPurePoisson, 300, 77, 8);
    CHECK(one == eight);
    CHECK(one.size() == 300);
    CHECK(run_batch(s, 0.9, WalkMode::Strict, 2, 1).size() == 2);
    CHECK_THROWS_AS(run_batch(s, 0.9, WalkMode::Strict, 1, 1), ParameterError);
}

TEST_CASE("runaway walks are reported") {
    // Atom at the top of the support: a non-strict walk sticks there.
    MixedDistribution d(UniformBase{0.0, 1.0}, 0.5, {{1.0, 0.5}});
    MixedSampler s(d);
    CHECK_THROWS_AS(run_walk(s, 1.0, WalkMode::NonStrict, RngStream(1, 0), 1000), RunawayWalkError);
}

TEST_CASE("merge_states") {
    WalkRecord a, b;
    a.states = {1, 3};
    a.count = 2;
    b.states = {2, 3};
    b.count = 2;
    const MergedStates m = merge_states({a, b});
    CHECK(m.merged == std::vector<double>{1, 2, 3, 3});
    CHECK(m.total_count == 4);
    CHECK_FALSE(m.total_pure_poisson.has_value());
    const MergedStates e = merge_states({});
    CHECK(e.merged.empty());
    CHECK(e.total_count == 0);

    WalkRecord c = a;
    c.level = 2.0;
    CHECK_THROWS_AS(merge_states({a, c}), UsageError);
}

TEST_CASE("derive_strict_counts") {
    WalkRecord cont;
    cont.states = {0.1, 0.2};
    cont.count = 2;
    CHECK(derive_strict_counts({cont}).empty());

    WalkRecord tied;
    tied.states = {0.5, 0.5, 0.5};
    tied.count = 3;
    const StrictCounts c = derive_strict_counts({tied});
    REQUIRE(c.size() == 1);
    CHECK(c.at(0.5) == 1);
    CHECK(derived_strict_total({tied, cont}) == 3);
}

TEST_CASE("derived strict visit frequency at the atom") {
    MixedSampler s(test_support::mixture());
    const auto recs = run_batch(s, 0.9, WalkMode::NonStrict, 1000, 5);
    // Strict visits are Bernoulli(6/13) per walk: sd of the mean ~ 0.016.
    std::uint64_t visits = 0;
    for (const auto& r : recs) {
        for (std::size_t k = 0; k < r.states.size(); ++k) {
            if (r.states[k] == 0.5 && (k == 0 || r.states[k - 1] != 0.5)) ++visits;
        }
    }
    const StrictCounts c = derive_strict_counts(recs);
    REQUIRE(c.count(0.5) == 1);
    CHECK(c.at(0.5) == visits);
    CHECK(std::fabs(static_cast<double>(c.at(0.5)) / 1000.0 - 6.0 / 13.0) < 0.064);
}
