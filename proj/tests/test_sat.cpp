#include <doctest.h>

#include "splitwalk/errors.hpp"
#include "splitwalk/oracles.hpp"
#include "splitwalk/targets/sat.hpp"

using namespace splitwalk;

namespace {

std::size_t naive_count(const SatProblem& p, const Assignment& a) {
    std::size_t s = 0;
    for (const auto& clause : p.clauses) {
        bool sat = false;
        for (int lit : clause) {
            const bool v = a.bits[static_cast<std::size_t>(std::abs(lit) - 1)] != 0;
            sat = sat || (lit > 0 ? v : !v);
        }
        s += sat;
    }
    return s;
}

}  // namespace

TEST_CASE("DIMACS parsing") {
    const SatProblem p = parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0");
    CHECK(p.n == 3);
    CHECK(p.m() == 2);
    CHECK(p.clauses == std::vector<std::vector<int>>{{1, -2}, {2, 3}});

    const SatProblem q = parse_dimacs("c comment\nc more\np cnf 4 2\n1 2\n -3 0 4\n0\n%\n0\n");
    CHECK(q.clauses == std::vector<std::vector<int>>{{1, 2, -3}, {4}});

    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n3 0"), ParseError);
    CHECK_THROWS_AS(parse_dimacs("1 2 0"), ParseError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 2 2\n1 0"), ParseError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 x 0"), ParseError);
    try {
        parse_dimacs("p cnf 2 1\n\n3 0");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK(parse_dimacs(to_dimacs(p)).clauses == p.clauses);
}

TEST_CASE("clause evaluation") {
    SatProblem pos{3, {{1, 2}, {3}, {2, 3}}};
    CHECK(count_satisfied(pos, Assignment{{1, 1, 1}}) == 3);
    const SatProblem p = parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0");
    CHECK(count_satisfied(p, Assignment{{0, 0, 0}}) == 1);
    CHECK_THROWS_AS(count_satisfied(p, Assignment{{0, 0}}), UsageError);
}

TEST_CASE("clause evaluation agrees with a naive evaluator") {
    RngStream rng(4, 0);
    for (int i = 0; i < 10000; ++i) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 20);
        const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(std::min(n, 4)));
        const SatProblem p = random_ksat(n, rng.next_u64() % 30, k, rng);
        const Assignment a = random_assignment(n, rng);
        REQUIRE(count_satisfied(p, a) == naive_count(p, a));
    }
}

TEST_CASE("model counting") {
    CHECK(brute_force_count(SatProblem{2, {{1, 2}}}) == 3);
    CHECK(brute_force_count(SatProblem{5, {}}) == 32);
    CHECK(brute_force_count(SatProblem{2, {{1}, {-1}}}) == 0);
    CHECK_THROWS_AS(brute_force_count(SatProblem{30, {}}), ParameterError);
}

TEST_CASE("Gibbs sampler keeps its invariant") {
    RngStream gen(6, 0);
    const SatProblem p = random_ksat(12, 40, 3, gen);
    const SatModel model(p);
    SatPopulation pop(model.m());
    RngStream rng(6, 1);
    for (int i = 0; i < 50; ++i) {
        Assignment a = random_assignment(12, rng);
        const std::size_t s = count_satisfied(p, a);
        pop.add(std::move(a), s);
    }
    for (int i = 0; i < 2000; ++i) {
        const double bound = static_cast<double>(30 + i % 8);
        const Strictness st = i % 2 ? Strictness::Strict : Strictness::NonStrict;
        if (pop.count_at_least(st == Strictness::Strict ? 31 + i % 8 : 30 + i % 8) == 0) continue;
        const auto [a, score] = sat_conditional(model, pop, bound, st, 5, rng);
        REQUIRE(score == count_satisfied(p, a));
        if (st == Strictness::Strict) {
            REQUIRE(static_cast<double>(score) > bound);
        } else {
            REQUIRE(static_cast<double>(score) >= bound);
        }
    }
}

TEST_CASE("Gibbs sampler from the full domain and starvation") {
    const SatProblem p = parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0");
    const SatModel model(p);
    SatPopulation pop(model.m());
    RngStream rng(1, 0);
    const auto [a, s] = sat_conditional(model, pop, 0.0, Strictness::NonStrict, 5, rng);
    CHECK(s == count_satisfied(p, a));
    CHECK(pop.size() == 1);
    SatPopulation empty(model.m());
    CHECK_THROWS_AS(sat_conditional(model, empty, 1.0, Strictness::Strict, 5, rng), SamplingError);
}

TEST_CASE("Gibbs sampler targets the uniform law on its domain") {
    // 3 variables, one clause (x1 or x2): 6 of 8 assignments satisfy it.
    const SatProblem p{3, {{1, 2}}};
    const SatModel model(p);
    SatPopulation pop(model.m());
    pop.add(Assignment{{1, 1, 1}}, 1);
    RngStream rng(2, 0);
    std::array<std::uint64_t, 8> hist{};
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        const auto [a, s] = sat_conditional(model, pop, 0.0, Strictness::Strict, 5, rng);
        REQUIRE(s == 1);
        ++hist[static_cast<std::size_t>(a.bits[0] | a.bits[1] << 1 | a.bits[2] << 2)];
    }
    std::vector<std::uint64_t> samples;
    for (std::size_t code = 0; code < 8; ++code) {
        if ((code & 3) == 0) {
            CHECK(hist[code] == 0);
            continue;
        }
        CHECK(binomial_test(hist[code], n, 1.0 / 6.0) > 0.001);
    }
}

TEST_CASE("random k-SAT instances") {
    RngStream rng(1, 0);
    const SatProblem p = random_ksat(12, 40, 3, rng);
    CHECK(p.n == 12);
    CHECK(p.m() == 40);
    for (const auto& c : p.clauses) {
        REQUIRE(c.size() == 3);
        REQUIRE(std::abs(c[0]) != std::abs(c[1]));
        REQUIRE(std::abs(c[1]) != std::abs(c[2]));
        REQUIRE(std::abs(c[0]) != std::abs(c[2]));
    }
    CHECK_THROWS_AS(random_ksat(2, 1, 3, rng), ParameterError);
}
