#include <doctest.h>

#include <cmath>
#include <numeric>

#include "splitwalk/distributions.hpp"
#include "splitwalk/errors.hpp"
#include "splitwalk/oracles.hpp"

using namespace splitwalk;

TEST_CASE("degenerate draws") {
    RngStream rng(1, 0);
    for (int i = 0; i < 100; ++i) {
        CHECK(draw_poisson(0.0, rng) == 0);
        CHECK(draw_geometric(1.0, rng) == 0);
        CHECK_FALSE(draw_bernoulli(0.0, rng));
        CHECK(draw_bernoulli(1.0, rng));
    }
    CHECK(std::get<std::uint64_t>(draw(Poisson{0.0}, rng)) == 0);
}

TEST_CASE("parameter validation") {
    RngStream rng(1, 0);
    CHECK_THROWS_AS(draw_geometric(0.0, rng), ParameterError);
    CHECK_THROWS_AS(draw_geometric(1.5, rng), ParameterError);
    CHECK_THROWS_AS(draw_poisson(-1.0, rng), ParameterError);
    CHECK_THROWS_AS(draw_bernoulli(std::nan(""), rng), ParameterError);
    CHECK_THROWS_AS(validate(CountLawSpec{1.0, {0.0}, CountKind::NonStrict}), ParameterError);
    CHECK_THROWS_AS(count_law_table(CountLawSpec{1.0, {}, CountKind::NonStrict}, 0.0), ParameterError);
}

TEST_CASE("geometric(0.4) mean over 1e6 draws") {
    RngStream rng(11, 0);
    double sum = 0.0;
    for (int i = 0; i < 1'000'000; ++i) sum += static_cast<double>(draw_geometric(0.4, rng));
    CHECK(std::fabs(sum / 1e6 - 1.5) < 0.005);
}

TEST_CASE("poisson sampler matches its pmf on both sampling branches") {
    for (double rate : {2.0, 35.0}) {
        RngStream rng(3, static_cast<std::uint64_t>(rate));
        std::vector<std::uint64_t> xs(20000);
        for (auto& x : xs) x = draw_poisson(rate, rng);
        const GofResult g = chisq_gof(xs, CountLawSpec{rate, {}, CountKind::NonStrict});
        CHECK(g.p_value > 0.001);
    }
}

TEST_CASE("count law pmf: empty atom list is Poisson") {
    const CountLawSpec law{0.7, {}, CountKind::NonStrict};
    for (std::uint64_t k = 0; k < 10; ++k) {
        const double direct = std::exp(-0.7) * std::pow(0.7, static_cast<double>(k)) / std::tgamma(k + 1.0);
        CHECK(count_law_pmf(law, k) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("count law moments: closed forms") {
    const Moments a = count_law_moments({2.0, {}, CountKind::NonStrict});
    CHECK(a.mean == 2.0);
    CHECK(a.variance == 2.0);
    const Moments b = count_law_moments({0.0, {0.5}, CountKind::NonStrict});
    CHECK(b.mean == doctest::Approx(1.0));
    CHECK(b.variance == doctest::Approx(2.0));
}

TEST_CASE("count law moments agree with pmf summation") {
    const std::vector<CountLawSpec> laws = {
        {1.3, {0.4, 0.8}, CountKind::NonStrict},
        {1.3, {0.4, 0.8}, CountKind::Strict},
        {0.2, {0.1}, CountKind::NonStrict},
        make_count_law(0.07, std::vector<double>{7.0 / 13.0}, CountKind::NonStrict).batch(10),
    };
    for (const CountLawSpec& law : laws) {
        const std::vector<double> f = count_law_table(law, 1e-14);
        double s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const double kd = static_cast<double>(k);
            s0 += f[k];
            s1 += kd * f[k];
            s2 += kd * kd * f[k];
        }
        const Moments m = count_law_moments(law);
        CHECK(std::fabs(s0 - 1.0) < 1e-12);
        CHECK(std::fabs(s1 - m.mean) < 1e-9 * std::max(1.0, m.mean));
        CHECK(std::fabs(s2 - s1 * s1 - m.variance) < 1e-9 * std::max(1.0, m.variance));
    }
}

TEST_CASE("unit atom ratios leave the law unchanged") {
    const CountLawSpec a{1.1, {}, CountKind::NonStrict};
    const CountLawSpec b{1.1, {1.0, 1.0}, CountKind::NonStrict};
    const CountLawSpec c{1.1, {1.0}, CountKind::Strict};
    for (std::uint64_t k = 0; k < 8; ++k) {
        CHECK(count_law_pmf(a, k) == count_law_pmf(b, k));
        CHECK(count_law_pmf(a, k) == count_law_pmf(c, k));
    }
}

TEST_CASE("count law matches simulated Poisson plus geometric sums") {
    // One atom with ratio 0.5 and rate log 2.
    const CountLawSpec law{std::log(2.0), {0.5}, CountKind::NonStrict};
    RngStream rng(17, 0);
    std::vector<std::uint64_t> xs(1'000'000);
    for (auto& x : xs) x = draw_poisson(law.poisson_rate, rng) + draw_geometric(0.5, rng);
    CHECK(chisq_gof(xs, law).p_value > 0.001);
}

TEST_CASE("make_count_law rate") {
    const std::vector<double> d{7.0 / 13.0};
    const CountLawSpec law = make_count_law(0.07, d, CountKind::Strict);
    CHECK(law.poisson_rate == doctest::Approx(-std::log(0.13)));
    CHECK(make_count_law(0.5, std::vector<double>{0.5}, CountKind::NonStrict).poisson_rate == 0.0);
    const CountLawSpec b = law.batch(3);
    CHECK(b.atoms.size() == 3);
    CHECK(b.poisson_rate == doctest::Approx(3 * law.poisson_rate));
}
