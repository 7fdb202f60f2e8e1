#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qlsep/concepts.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/gf2.hpp"
#include "qlsep/statevector.hpp"

namespace qlsep {

inline constexpr const char *kDecodeRuleVersion = "v1";

// Classical description of the measurement circuit U_x: CNOTs fanned out
// from the pivot (the lowest set bit of x), then H on the pivot, then a
// computational-basis measurement with the fixed decode rule below.
//
// The CNOT layer acts on basis labels as the involution
//   L(y)_p = y_p,  L(y)_j = y_j xor (x_j and y_p)  for j != p,
// so the circuit has |cnots| + 1 = popcount(x) gates, O(n) total.
struct MatchingCircuit {
    int n = 0;
    std::uint64_t x = 0;
    int pivot = 0;
    std::vector<std::pair<int, int>> cnots;  // (control = pivot, target)

    // The CNOT-layer involution on basis labels.
    std::uint64_t label_map(std::uint64_t y) const {
        if ((y >> pivot) & 1u) {
            return y ^ (x & ~(std::uint64_t{1} << pivot));
        }
        return y;
    }
};

struct LearnerOutput {
    MatchingCircuit circuit;
    LabelMode label_mode = LabelMode::FullX;
    std::size_t examples_used = 0;
};

inline MatchingCircuit build_ux(std::uint64_t x, int n) {
    if (n < 1 || n > 63) {
        throw DimensionError("build_ux: invalid qubit count");
    }
    if (x == 0) {
        throw DegenerateMatchingError("build_ux: x = 0 yields self-loop edges, no circuit");
    }
    if (x >> n) {
        throw DimensionError("build_ux: x has bits beyond n");
    }
    MatchingCircuit c;
    c.n = n;
    c.x = x;
    c.pivot = std::countr_zero(x);
    for (int j = 0; j < n; ++j) {
        if (j != c.pivot && ((x >> j) & 1u)) {
            c.cnots.emplace_back(c.pivot, j);
        }
    }
    return c;
}

// Applies the full U_x (CNOT layer, then H on the pivot) in place.
inline void apply_matching_circuit(StateVector &s, const MatchingCircuit &c) {
    if (s.n != c.n) {
        throw DimensionError("apply_matching_circuit: qubit count mismatch");
    }
    for (const auto &[control, target] : c.cnots) {
        apply_cnot(s, control, target);
    }
    apply_h(s, c.pivot);
}

// Decode rule v1 for a measured label w: b = w_p; clear the pivot bit and
// undo the CNOT layer to get one endpoint of the edge.
inline std::pair<std::uint64_t, int> decode_outcome(const MatchingCircuit &c, std::uint64_t w) {
    const int b = static_cast<int>((w >> c.pivot) & 1u);
    const std::uint64_t u = w & ~(std::uint64_t{1} << c.pivot);
    return {c.label_map(u), b};
}

// Measures Pi_x on |psi_f>: prepare, run U_x, measure, decode, and pick the
// edge endpoint with a fair coin. The output distribution is exactly
// pi_x(f); every emitted (y, b) satisfies the relation.
inline ConceptSample measure_concept(const MatchingCircuit &c, const BoolFunc &f, Rng &rng,
                                     int cap = kMaxSimQubits) {
    if (c.n != f.n()) {
        throw DimensionError("measure_concept: circuit and function disagree on n");
    }
    StateVector s = prepare_phase_state(f, cap);
    apply_matching_circuit(s, c);
    const std::uint64_t w = sample_outcome(s, rng);
    auto [y0, b] = decode_outcome(c, w);
    ConceptSample out;
    out.n = c.n;
    out.x = c.x;
    out.y = rng.coin() ? (y0 ^ c.x) : y0;
    out.b = b;
    return out;
}

// Exact output distribution of the generator above, computed from the final
// statevector's Born probabilities plus the endpoint coin.
inline ConceptDistribution fq_exact_distribution(const MatchingCircuit &c, const BoolFunc &f,
                                                 int cap = kMaxSimQubits) {
    if (c.n != f.n()) {
        throw DimensionError("fq_exact_distribution: circuit and function disagree on n");
    }
    StateVector s = prepare_phase_state(f, cap);
    apply_matching_circuit(s, c);
    ConceptDistribution d;
    d.n = c.n;
    d.x = c.x;
    d.p.assign(std::size_t{1} << (c.n + 1), 0.0);
    const auto born = outcome_distribution(s);
    for (std::uint64_t w = 0; w < born.size(); ++w) {
        if (born[w] == 0.0) {
            continue;
        }
        auto [y0, b] = decode_outcome(c, w);
        d.at(y0, b) += 0.5 * born[w];
        d.at(y0 ^ c.x, b) += 0.5 * born[w];
    }
    return d;
}

// Recovers x from labels. FullX: all labels must agree. Parity: solve the
// induced GF(2) system; rank deficits are recoverable by asking for more
// examples, contradictions are not.
inline std::uint64_t recover_x(const std::vector<Label> &labels, LabelMode mode, int n) {
    if (labels.empty()) {
        throw InsufficientDataError("recover_x: no labels");
    }
    if (mode == LabelMode::FullX) {
        const std::uint64_t x = labels.front().full.x;
        for (const auto &l : labels) {
            if (l.mode != mode) {
                throw CorruptDataError("recover_x: mixed label modes");
            }
            if (l.full.x != x) {
                throw CorruptDataError("recover_x: labels disagree on x");
            }
        }
        return x;
    }
    Gf2System sys;
    sys.n = static_cast<std::size_t>(n);
    for (const auto &l : labels) {
        if (l.mode != mode) {
            throw CorruptDataError("recover_x: mixed label modes");
        }
        sys.add_row(BitVec::from_u64(l.parity_i, static_cast<std::size_t>(n)), l.parity_bit);
    }
    const Gf2Solution sol = solve_system(sys);
    switch (sol.status) {
    case Gf2Status::Solved:
        return sol.x.to_u64();
    case Gf2Status::Underdetermined:
        throw InsufficientDataError("recover_x: parity system rank " + std::to_string(sol.rank) +
                                    " < " + std::to_string(n));
    default:
        throw CorruptDataError("recover_x: parity labels are inconsistent");
    }
}

// The fully-quantum protocol: recover x, then synthesize U_x. The returned
// description replayed through measure_concept realizes pi_x exactly.
inline LearnerOutput fully_quantum_learn(const std::vector<TrainingExample> &data) {
    if (data.empty()) {
        throw InsufficientDataError("fully_quantum_learn: empty training data");
    }
    const int n = data.front().f.n();
    const LabelMode mode = data.front().label.mode;
    std::vector<Label> labels;
    labels.reserve(data.size());
    for (const auto &ex : data) {
        labels.push_back(ex.label);
    }
    LearnerOutput out;
    out.label_mode = mode;
    out.examples_used = data.size();
    out.circuit = build_ux(recover_x(labels, mode, n), n);
    return out;
}

} // namespace qlsep
