#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qlsep/statevector.hpp"
#include "qlsep/verify.hpp"

using namespace qlsep;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("H on |0>", "[qsim]") {
    StateVector s = StateVector::zero_state(1);
    apply_gate(s, GateOp{HGate{0}});
    REQUIRE(std::abs(s.amps[0] - cplx{kInvSqrt2, 0.0}) < 1e-12);
    REQUIRE(std::abs(s.amps[1] - cplx{kInvSqrt2, 0.0}) < 1e-12);
}

TEST_CASE("phase oracle flips the f=1 amplitudes", "[qsim]") {
    StateVector s = StateVector::zero_state(1);
    apply_h(s, 0);
    const BoolFunc f = BoolFunc::from_table(1, BitVec::from_u64(0b10, 2));  // f(0)=0, f(1)=1
    apply_gate(s, GateOp{PhaseOracleGate{f}});
    REQUIRE(std::abs(s.amps[0] - cplx{kInvSqrt2, 0.0}) < 1e-12);
    REQUIRE(std::abs(s.amps[1] - cplx{-kInvSqrt2, 0.0}) < 1e-12);
}

TEST_CASE("CNOT permutes basis labels (little-endian)", "[qsim]") {
    // |01> in the project bit order: qubit 0 = 1, qubit 1 = 0, index 1.
    StateVector s = StateVector::basis_state(2, 1);
    apply_gate(s, GateOp{CnotGate{0, 1}});
    REQUIRE(std::abs(s.amps[3] - cplx{1.0, 0.0}) < 1e-12);  // |11>
    // And a control-off label is fixed.
    StateVector t = StateVector::basis_state(2, 2);
    apply_cnot(t, 0, 1);
    REQUIRE(std::abs(t.amps[2] - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("gate index validation", "[qsim]") {
    StateVector s = StateVector::zero_state(2);
    REQUIRE_THROWS_AS(apply_h(s, 2), DimensionError);
    REQUIRE_THROWS_AS(apply_cnot(s, 0, 0), DimensionError);
    REQUIRE_THROWS_AS(StateVector::zero_state(kMaxSimQubits + 1), CapacityError);
    const BoolFunc f = BoolFunc::from_table(1, BitVec::from_u64(0, 2));
    REQUIRE_THROWS_AS(apply_phase_oracle(s, f), DimensionError);
}

TEST_CASE("outcome_distribution examples", "[qsim]") {
    SECTION("phase states have flat magnitudes") {
        Rng rng(3);
        const BoolFunc f = BoolFunc::random_table(4, rng);
        StateVector s;
        s.n = 4;
        s.amps.resize(16);
        for (std::uint64_t i = 0; i < 16; ++i) {
            s.amps[i] = (f.query(i) ? -0.25 : 0.25);
        }
        for (double p : outcome_distribution(s)) {
            REQUIRE(std::abs(p - 1.0 / 16.0) < 1e-12);
        }
    }
    SECTION("H tensor H maps a constant-f phase state to |00>") {
        StateVector s;
        s.n = 2;
        s.amps = {0.5, 0.5, 0.5, 0.5};  // f = [0,0,0,0]
        apply_h(s, 0);
        apply_h(s, 1);
        const auto p = outcome_distribution(s);
        REQUIRE(std::abs(p[0] - 1.0) < 1e-12);
        REQUIRE(std::abs(p[1]) < 1e-12);
        REQUIRE(std::abs(p[2]) < 1e-12);
        REQUIRE(std::abs(p[3]) < 1e-12);
    }
}

TEST_CASE("sample examples", "[qsim]") {
    SECTION("point mass always returns its label") {
        StateVector s = StateVector::basis_state(3, 5);
        Rng rng(1);
        for (int t = 0; t < 100; ++t) {
            REQUIRE(sample_outcome(s, rng) == 5);
        }
    }
    SECTION("uniform state frequencies within 0.01 of 0.25") {
        StateVector s;
        s.n = 2;
        s.amps = {0.5, 0.5, 0.5, 0.5};
        Rng rng(2);
        int counts[4] = {0, 0, 0, 0};
        const int draws = 100000;
        for (int t = 0; t < draws; ++t) {
            ++counts[sample_outcome(s, rng)];
        }
        for (int i = 0; i < 4; ++i) {
            REQUIRE(std::abs(counts[i] / static_cast<double>(draws) - 0.25) < 0.01);
        }
    }
    SECTION("same seed, same sequence") {
        StateVector s;
        s.n = 2;
        s.amps = {0.5, 0.5, 0.5, 0.5};
        Rng a(7);
        Rng b(7);
        for (int t = 0; t < 200; ++t) {
            REQUIRE(sample_outcome(s, a) == sample_outcome(s, b));
        }
    }
}

TEST_CASE("statevector property suites", "[qsim][properties]") {
    REQUIRE(check_sv_norm_preservation(Rng(10)).pass);
    REQUIRE(check_sv_involutions(Rng(11)).pass);
    REQUIRE(check_sv_sample_frequencies(Rng(12)).pass);
}
