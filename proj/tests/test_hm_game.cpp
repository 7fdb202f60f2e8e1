#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "qlsep/evaluation.hpp"
#include "qlsep/hm_game.hpp"

using namespace qlsep;

namespace {
BoolFunc table(int n, std::uint64_t bits) {
    return BoolFunc::from_table(n, BitVec::from_u64(bits, std::size_t{1} << n));
}
} // namespace

TEST_CASE("matchings are perfect and pairwise edge-disjoint", "[hm]") {
    Rng rng(1);
    SECTION("each M_x has 2^{n-1} edges covering every vertex once") {
        for (int n = 1; n <= 10; ++n) {
            const std::uint64_t x = rng.next_nonzero_bits(n);
            const Matching m(n, x);
            const auto edges = m.edges();
            REQUIRE(edges.size() == (std::size_t{1} << (n - 1)));
            std::set<std::uint64_t> seen;
            for (const auto &[a, b] : edges) {
                REQUIRE((a ^ b) == x);
                seen.insert(a);
                seen.insert(b);
            }
            REQUIRE(seen.size() == (std::size_t{1} << n));
        }
    }
    SECTION("200 random pairs share no edge") {
        const int n = 10;
        for (int t = 0; t < 200; ++t) {
            const std::uint64_t x1 = rng.next_nonzero_bits(n);
            std::uint64_t x2 = rng.next_nonzero_bits(n);
            while (x2 == x1) {
                x2 = rng.next_nonzero_bits(n);
            }
            // An edge {y, y^x1} of M_x1 lies in M_x2 iff x1 == x2.
            for (int s = 0; s < 50; ++s) {
                const std::uint64_t y = rng.next_bits(n);
                REQUIRE((y ^ (y ^ x1)) != x2);
            }
        }
    }
    SECTION("x = 0 is rejected") {
        REQUIRE_THROWS_AS(Matching(3, 0), DegenerateMatchingError);
    }
}

TEST_CASE("hm_quantum examples", "[hm]") {
    SECTION("n=1, x=1, f=[0,1]: the only edge with parity 1") {
        Rng rng(2);
        const HmInstance inst{table(1, 0b10), 1};
        const HmAnswer a = hm_quantum(inst, rng);
        REQUIRE(a == HmAnswer::canonical(0, 1, 1));
    }
    SECTION("zero failures over random instances at n <= 8") {
        Rng rng(3);
        for (int t = 0; t < 1000; ++t) {
            const int n = 1 + static_cast<int>(rng.next_below(8));
            const HmInstance inst{BoolFunc::random_table(n, rng), rng.next_nonzero_bits(n)};
            REQUIRE(answer_correct(inst, hm_quantum(inst, rng)));
        }
    }
    SECTION("exact invalid-outcome mass below 1e-12") {
        Rng rng(4);
        for (int t = 0; t < 100; ++t) {
            const int n = 1 + static_cast<int>(rng.next_below(8));
            const HmInstance inst{BoolFunc::random_table(n, rng), rng.next_nonzero_bits(n)};
            REQUIRE(hm_invalid_mass(inst) < 1e-12);
        }
    }
}

TEST_CASE("hm classical baseline", "[hm]") {
    Rng rng(5);
    SECTION("a full-table budget wins every time") {
        const int n = 3;
        for (int t = 0; t < 200; ++t) {
            const HmInstance inst{BoolFunc::random_table(n, rng), rng.next_nonzero_bits(n)};
            const HmAnswer a = hm_classical_baseline(2 << n, inst, rng);
            REQUIRE(answer_correct(inst, a));
        }
    }
    SECTION("minimum budget is near chance for larger n") {
        const int n = 10;
        int correct = 0;
        const int trials = 2000;
        for (int t = 0; t < trials; ++t) {
            const HmInstance inst{BoolFunc::random_table(n, rng), rng.next_nonzero_bits(n)};
            correct += answer_correct(inst, hm_classical_baseline(2, inst, rng)) ? 1 : 0;
        }
        const double rate = static_cast<double>(correct) / trials;
        REQUIRE(rate > 0.42);
        REQUIRE(rate < 0.58);
    }
    SECTION("success is monotone nondecreasing in the budget (measured)") {
        const int n = 5;
        double last = -1.0;
        for (const int c : {2, 8, 24, 64}) {
            Rng local(100 + c);
            int correct = 0;
            const int trials = 3000;
            for (int t = 0; t < trials; ++t) {
                const HmInstance inst{BoolFunc::random_table(n, local),
                                      local.next_nonzero_bits(n)};
                correct += answer_correct(inst, hm_classical_baseline(c, inst, local)) ? 1 : 0;
            }
            const double rate = static_cast<double>(correct) / trials;
            REQUIRE(rate >= last - 0.03);  // allow statistical wiggle
            last = rate;
        }
    }
    SECTION("budget below 2 is rejected") {
        const HmInstance inst{table(2, 0b0110), 1};
        REQUIRE_THROWS_AS(hm_classical_baseline(1, inst, rng), ConfigError);
    }
}

TEST_CASE("measure-first reduction", "[hm]") {
    Rng rng(6);
    SECTION("leaky reduction: success 1.0 at cost 2^n bits") {
        const int n = 5;
        Strategy s = Strategy::leaky(1, true);
        for (int t = 0; t < 100; ++t) {
            const HmInstance inst{BoolFunc::random_table(n, rng), rng.next_nonzero_bits(n)};
            const HmReductionResult r =
                reduce_measure_first(s, 2, FSource::uniform(), inst, rng);
            REQUIRE(answer_correct(inst, r.answer));
            REQUIRE(r.sent_bits == (1 << n));
        }
    }
    SECTION("shadow reduction at n=6 sits well below the 7/8 threshold") {
        const int n = 6;
        const Strategy s = Strategy::pauli_shadows(default_ell(n), 51);
        int correct = 0;
        const int trials = 300;
        for (int t = 0; t < trials; ++t) {
            Rng trial = rng.child(static_cast<std::uint64_t>(t));
            const HmInstance inst{BoolFunc::random_table(n, trial), trial.next_nonzero_bits(n)};
            const HmReductionResult r =
                reduce_measure_first(s, 2, FSource::uniform(), inst, trial);
            REQUIRE(r.sent_bits == std::int64_t{3} * n * s.ell);
            correct += answer_correct(inst, r.answer) ? 1 : 0;
        }
        REQUIRE(static_cast<double>(correct) / trials < 0.8);
    }
    SECTION("the transmitted payload is exactly the measured rep bits") {
        const int n = 4;
        const Strategy s = Strategy::pauli_shadows(20, 7);
        const HmInstance inst{BoolFunc::random_table(n, rng), rng.next_nonzero_bits(n)};
        Rng run_rng(1234);
        const HmReductionResult r = reduce_measure_first(s, 2, FSource::uniform(), inst, run_rng);
        Rng alice(derive_seed(1234, 1));
        const ClassicalRep direct = measure(s, inst.f, s.ell, alice);
        REQUIRE(r.payload.bits == direct.bits);
        REQUIRE(r.sent_bits == direct.m);
    }
    SECTION("information firewall: Bob's answer depends only on (x, payload, seed)") {
        const int n = 4;
        Strategy s = Strategy::leaky(1, true);
        const BoolFunc f1 = table(n, 0x0f0f);
        const BoolFunc f2 = table(n, 0x1234);
        Rng a1(42);
        const ClassicalRep payload = measure(s, f1, 1, a1);
        Rng b1(43);
        Rng b2(43);
        const HmAnswer ans1 = hm_reduction_bob(0b101, n, s, 2, FSource::uniform(), payload, b1);
        // Same payload bits and Bob seed, different f on Alice's side.
        (void)f2;
        const HmAnswer ans2 = hm_reduction_bob(0b101, n, s, 2, FSource::uniform(), payload, b2);
        REQUIRE(ans1 == ans2);
    }
}

TEST_CASE("estimate_success", "[hm]") {
    SECTION("quantum protocol is exactly 1.0") {
        Rng rng(7);
        const SuccessEstimate e = estimate_success(HmQuantumProtocol{}, 4, 500, rng);
        REQUIRE(e.rate == 1.0);
        REQUIRE(e.mean_sent_bits == 0.0);
    }
    SECTION("random guess is a fair coin") {
        Rng rng(8);
        const SuccessEstimate e = estimate_success(HmRandomGuessProtocol{}, 6, 4000, rng);
        REQUIRE(e.rate > 0.45);
        REQUIRE(e.rate < 0.55);
        REQUIRE(e.ci.contains(0.5));
    }
    SECTION("same seed, same rate") {
        Rng a(9);
        Rng b(9);
        const SuccessEstimate ea = estimate_success(HmClassicalProtocol{8}, 4, 300, a);
        const SuccessEstimate eb = estimate_success(HmClassicalProtocol{8}, 4, 300, b);
        REQUIRE(ea.rate == eb.rate);
        REQUIRE(ea.mean_sent_bits == eb.mean_sent_bits);
    }
    SECTION("trials must be positive") {
        Rng rng(10);
        REQUIRE_THROWS_AS(estimate_success(HmQuantumProtocol{}, 4, 0, rng), ConfigError);
    }
}
