#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qlsep/fq_learner.hpp"

using namespace qlsep;

namespace {
BoolFunc table(int n, std::uint64_t bits) {
    return BoolFunc::from_table(n, BitVec::from_u64(bits, std::size_t{1} << n));
}
} // namespace

TEST_CASE("build_ux examples", "[fq]") {
    SECTION("unit-vector x has an empty CNOT layer") {
        const MatchingCircuit c = build_ux(0b01, 2);
        REQUIRE(c.pivot == 0);
        REQUIRE(c.cnots.empty());
        for (std::uint64_t y = 0; y < 4; ++y) {
            REQUIRE(c.label_map(y) == y);
        }
    }
    SECTION("x = 11 fans one CNOT out of the pivot") {
        const MatchingCircuit c = build_ux(0b11, 2);
        REQUIRE(c.pivot == 0);
        REQUIRE(c.cnots == std::vector<std::pair<int, int>>{{0, 1}});
        REQUIRE(c.label_map(0b01) == 0b11);
        REQUIRE(c.label_map(0b11) == 0b01);
        REQUIRE(c.label_map(0b00) == 0b00);
        REQUIRE(c.label_map(0b10) == 0b10);
    }
    SECTION("x = 111") {
        const MatchingCircuit c = build_ux(0b111, 3);
        REQUIRE(c.pivot == 0);
        REQUIRE(c.cnots == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}});
        for (std::uint64_t y = 0; y < 8; ++y) {
            REQUIRE(c.label_map(c.label_map(y)) == y);  // involution
        }
    }
    SECTION("x = 0 is degenerate") {
        REQUIRE_THROWS_AS(build_ux(0, 3), DegenerateMatchingError);
    }
    SECTION("pivot is the lowest set bit") {
        const MatchingCircuit c = build_ux(0b1100, 4);
        REQUIRE(c.pivot == 2);
        REQUIRE(c.cnots == std::vector<std::pair<int, int>>{{2, 3}});
    }
    SECTION("circuit size is popcount(x) <= n gates") {
        Rng rng(1);
        for (int t = 0; t < 100; ++t) {
            const int n = 1 + static_cast<int>(rng.next_below(12));
            const std::uint64_t x = rng.next_nonzero_bits(n);
            const MatchingCircuit c = build_ux(x, n);
            REQUIRE(c.cnots.size() + 1 == static_cast<std::size_t>(std::popcount(x)));
            REQUIRE(c.cnots.size() + 1 <= static_cast<std::size_t>(n));
        }
    }
    SECTION("label_map matches the closed form on every basis label") {
        Rng rng(2);
        for (int t = 0; t < 100; ++t) {
            const int n = 1 + static_cast<int>(rng.next_below(10));
            const std::uint64_t x = rng.next_nonzero_bits(n);
            const MatchingCircuit c = build_ux(x, n);
            for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
                std::uint64_t expect = 0;
                for (int j = 0; j < n; ++j) {
                    const std::uint64_t yj = (y >> j) & 1u;
                    const std::uint64_t xj = (x >> j) & 1u;
                    const std::uint64_t yp = (y >> c.pivot) & 1u;
                    const std::uint64_t bit = j == c.pivot ? yp : (yj ^ (xj & yp));
                    expect |= bit << j;
                }
                REQUIRE(c.label_map(y) == expect);
            }
        }
    }
}

TEST_CASE("measure_concept examples", "[fq]") {
    SECTION("linear f: b always f(x)") {
        const MatchingCircuit c = build_ux(0b11, 2);
        const BoolFunc f = table(2, 0b0110);  // XOR, f(11)=0
        Rng rng(3);
        for (int t = 0; t < 1000; ++t) {
            const ConceptSample s = measure_concept(c, f, rng);
            REQUIRE(s.b == 0);
            REQUIRE(s.x == 0b11);
        }
    }
    SECTION("AND function at x=01: exact distribution and sampled support") {
        const MatchingCircuit c = build_ux(0b01, 2);
        const BoolFunc f = table(2, 0b1000);
        const ConceptDistribution exact = fq_exact_distribution(c, f);
        const ConceptDistribution truth = concept_distribution(f, 0b01);
        REQUIRE(tv_distance(exact, truth) < 1e-12);
        Rng rng(4);
        for (int t = 0; t < 2000; ++t) {
            const ConceptSample s = measure_concept(c, f, rng);
            REQUIRE(truth.at(s.y, s.b) == 0.25);
        }
    }
    SECTION("membership holds on every draw") {
        Rng rng(5);
        for (int t = 0; t < 20; ++t) {
            const int n = 1 + static_cast<int>(rng.next_below(6));
            const BoolFunc f = BoolFunc::random_table(n, rng);
            const std::uint64_t x = rng.next_nonzero_bits(n);
            const MatchingCircuit c = build_ux(x, n);
            for (int d = 0; d < 500; ++d) {
                const ConceptSample s = measure_concept(c, f, rng);
                REQUIRE(in_relation(f, x, s.y, s.b));
            }
        }
    }
}

TEST_CASE("fq generator invariants", "[fq]") {
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + static_cast<int>(rng.next_below(6));
        const BoolFunc f = BoolFunc::random_table(n, rng);
        const std::uint64_t x = rng.next_nonzero_bits(n);
        const MatchingCircuit c = build_ux(x, n);
        const ConceptDistribution d = fq_exact_distribution(c, f);

        // Zero invalid mass.
        double invalid = 0.0;
        for (std::uint64_t y = 0; y < f.domain_size(); ++y) {
            invalid += d.at(y, 1 - relation_b(f, x, y));
        }
        REQUIRE(invalid < 1e-12);

        // Endpoint coin uniformity: y-marginal uniform over all 2^n labels.
        const double expect = 1.0 / static_cast<double>(f.domain_size());
        for (std::uint64_t y = 0; y < f.domain_size(); ++y) {
            REQUIRE(std::abs(d.at(y, 0) + d.at(y, 1) - expect) < 1e-12);
        }
    }
}

TEST_CASE("recover_x examples", "[fq]") {
    SECTION("FullX: agreeing labels") {
        std::vector<Label> labels;
        for (int i = 0; i < 3; ++i) {
            Label l;
            l.mode = LabelMode::FullX;
            l.full = ConceptSample{4, 0b1011, static_cast<std::uint64_t>(i), 0};
            labels.push_back(l);
        }
        REQUIRE(recover_x(labels, LabelMode::FullX, 4) == 0b1011);
    }
    SECTION("FullX: disagreeing labels are corrupt") {
        std::vector<Label> labels(2);
        labels[0].mode = labels[1].mode = LabelMode::FullX;
        labels[0].full = ConceptSample{4, 0b1011, 0, 0};
        labels[1].full = ConceptSample{4, 0b0011, 0, 0};
        REQUIRE_THROWS_AS(recover_x(labels, LabelMode::FullX, 4), CorruptDataError);
    }
    SECTION("parity: two independent equations pin x at n=2") {
        std::vector<Label> labels(2);
        labels[0].mode = labels[1].mode = LabelMode::Parity;
        labels[0].parity_i = 0b01;
        labels[0].parity_bit = 0;
        labels[1].parity_i = 0b10;
        labels[1].parity_bit = 1;
        REQUIRE(recover_x(labels, LabelMode::Parity, 2) == 0b10);
    }
    SECTION("parity: rank 1 < 2 is insufficient") {
        std::vector<Label> labels(1);
        labels[0].mode = LabelMode::Parity;
        labels[0].parity_i = 0b10;
        labels[0].parity_bit = 1;
        REQUIRE_THROWS_AS(recover_x(labels, LabelMode::Parity, 2), InsufficientDataError);
    }
    SECTION("parity: contradictions are corrupt") {
        std::vector<Label> labels(2);
        labels[0].mode = labels[1].mode = LabelMode::Parity;
        labels[0].parity_i = 0b10;
        labels[0].parity_bit = 1;
        labels[1].parity_i = 0b10;
        labels[1].parity_bit = 0;
        REQUIRE_THROWS_AS(recover_x(labels, LabelMode::Parity, 2), CorruptDataError);
    }
    SECTION("empty labels") {
        REQUIRE_THROWS_AS(recover_x({}, LabelMode::FullX, 2), InsufficientDataError);
    }
}

TEST_CASE("fully_quantum_learn end to end", "[fq]") {
    SECTION("a single FullX example suffices") {
        Rng rng(7);
        const auto data =
            generate_training_data(0b10, 1, 1, LabelMode::FullX, FSource::uniform(), 2, rng);
        const LearnerOutput out = fully_quantum_learn(data);
        REQUIRE(out.circuit.x == 0b10);
        REQUIRE(out.circuit.n == 2);
        REQUIRE(out.examples_used == 1);
    }
    SECTION("n+10 parity examples reach the same circuit") {
        Rng rng(8);
        const int n = 6;
        int agree = 0;
        const int trials = 300;
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t x = rng.next_nonzero_bits(n);
            const auto data = generate_training_data(x, n + 10, 1, LabelMode::Parity,
                                                     FSource::uniform(), n, rng);
            try {
                const LearnerOutput out = fully_quantum_learn(data);
                if (out.circuit.x == x) {
                    ++agree;
                }
            } catch (const InsufficientDataError &) {
            }
        }
        REQUIRE(agree >= trials - 5);
    }
    SECTION("exact TV against the concept distribution is zero") {
        Rng rng(9);
        for (int n = 1; n <= 6; ++n) {
            const std::uint64_t x = rng.next_nonzero_bits(n);
            const auto data =
                generate_training_data(x, 1, 1, LabelMode::FullX, FSource::uniform(), n, rng);
            const LearnerOutput out = fully_quantum_learn(data);
            for (int j = 0; j < 20; ++j) {
                const BoolFunc f = BoolFunc::random_table(n, rng);
                const double tv =
                    tv_distance(fq_exact_distribution(out.circuit, f), concept_distribution(f, x));
                REQUIRE(tv <= 1e-9);
            }
        }
    }
    SECTION("x = 0 in the labels is degenerate") {
        Rng rng(10);
        const auto data =
            generate_training_data(0, 1, 1, LabelMode::FullX, FSource::uniform(), 3, rng);
        REQUIRE_THROWS_AS(fully_quantum_learn(data), DegenerateMatchingError);
    }
}
