#include <doctest.h>

#include <set>

#include "splitwalk/rng.hpp"

using namespace splitwalk;

TEST_CASE("philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next_u64();
        CHECK(x == b.next_u64());
        firsts.insert(x);
    }
    CHECK(firsts.size() == 100);
    RngStream a2(42, 7);
    CHECK(a2.next_u64() != c.next_u64());
    RngStream a3(42, 7);
    CHECK(a3.next_u64() != d.next_u64());
}

TEST_CASE("uniform stays inside the open unit interval") {
    RngStream r(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("substreams do not collide with the parent family") {
    RngStream parent(5, 3);
    RngStream child = parent.substream(1);
    RngStream sibling(5, 1);
    CHECK(child.next_u64() != sibling.next_u64());
    RngStream again = RngStream(5, 3).substream(1);
    RngStream child2 = parent.substream(1);
    CHECK(again.next_u64() == child2.next_u64());
}
