#include <catch2/catch_amalgamated.hpp>

#include "qlsep/boolfunc.hpp"
#include "qlsep/prf.hpp"
#include "qlsep/verify.hpp"

using namespace qlsep;

TEST_CASE("sample_key matches the spec length and is seed-determined", "[prf]") {
    PrfSpec spec;
    Rng a(1);
    Rng b(1);
    const BitVec k1 = sample_key(spec, a);
    const BitVec k2 = sample_key(spec, b);
    REQUIRE(k1.size() == 128);
    REQUIRE(k1 == k2);

    Rng c(2);
    REQUIRE_FALSE(sample_key(spec, c) == k1);

    PrfSpec bad;
    bad.key_bits = 100;
    Rng d(3);
    REQUIRE_THROWS_AS(sample_key(bad, d), ConfigError);
}

TEST_CASE("prf_eval is a deterministic bit", "[prf]") {
    PrfSpec spec;
    Rng rng(4);
    const BitVec key = sample_key(spec, rng);
    for (int t = 0; t < 200; ++t) {
        const std::uint64_t y = rng.next_bits(16);
        const int bit = prf_eval(spec, key, y, 16);
        REQUIRE((bit == 0 || bit == 1));
        REQUIRE(prf_eval(spec, key, y, 16) == bit);
        REQUIRE(prf_eval(spec, key, BitVec::from_u64(y, 16)) == bit);
    }
    REQUIRE_THROWS_AS(prf_eval(spec, BitVec(64), std::uint64_t{0}, 8), DimensionError);
}

TEST_CASE("prf statistical battery", "[prf][properties]") {
    const CheckResult r = check_prf_battery(Rng(77));
    INFO(r.detail);
    REQUIRE(r.pass);
}

TEST_CASE("prf-backed BoolFunc agrees with its materialized table", "[prf]") {
    PrfSpec spec;
    Rng rng(5);
    for (int n = 1; n <= 10; ++n) {
        const BoolFunc f = BoolFunc::prf_backed(n, spec, sample_key(spec, rng));
        const BoolFunc g = BoolFunc::from_table(n, f.to_table());
        for (std::uint64_t y = 0; y < f.domain_size(); ++y) {
            REQUIRE(f.query(y) == g.query(y));
        }
    }
}

TEST_CASE("prf/table backing equivalence for phase states and relations", "[prf][properties]") {
    REQUIRE(check_backing_equivalence(Rng(6)).pass);
}
