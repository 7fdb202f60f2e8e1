#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "qlsep/rng.hpp"

using namespace qlsep;

TEST_CASE("identical seeds give identical streams", "[rng]") {
    Rng a(123);
    Rng b(123);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("next_below stays in range and covers small supports", "[rng]") {
    Rng rng(5);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = rng.next_below(3);
        REQUIRE(v < 3);
        seen.insert(v);
    }
    REQUIRE(seen.size() == 3);
    REQUIRE_THROWS_AS(rng.next_below(0), DimensionError);
}

TEST_CASE("next_bits and next_nonzero_bits", "[rng]") {
    Rng rng(6);
    for (int n = 1; n <= 24; ++n) {
        for (int i = 0; i < 50; ++i) {
            REQUIRE((rng.next_bits(n) >> n) == 0);
            const std::uint64_t v = rng.next_nonzero_bits(n);
            REQUIRE(v != 0);
            REQUIRE((v >> n) == 0);
        }
    }
}

TEST_CASE("derive_seed separates lanes", "[rng]") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t lane = 0; lane < 1000; ++lane) {
        seeds.insert(derive_seed(42, lane));
    }
    REQUIRE(seeds.size() == 1000);
    REQUIRE(derive_seed(42, 1) != derive_seed(43, 1));
}

TEST_CASE("child streams are reproducible", "[rng]") {
    Rng parent(99);
    Rng c1 = parent.child(7);
    Rng c2 = parent.child(7);
    REQUIRE(c1.next_u64() == c2.next_u64());
    REQUIRE(parent.child(7).seed() != parent.child(8).seed());
}

TEST_CASE("sample_index follows the weights", "[rng]") {
    Rng rng(11);
    const std::vector<double> w{0.0, 0.25, 0.75};
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 20000; ++i) {
        ++counts[sample_index(w, rng)];
    }
    REQUIRE(counts[0] == 0);
    REQUIRE(std::abs(counts[1] - 5000) < 400);
    REQUIRE(std::abs(counts[2] - 15000) < 400);
}
