#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "qlsep/concepts.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/fq_learner.hpp"
#include "qlsep/mf_learner.hpp"
#include "qlsep/stats.hpp"

namespace qlsep {

// The perfect matching M_x pairing y with y xor x. Matchings for distinct
// nonzero x are pairwise edge-disjoint.
struct Matching {
    int n = 0;
    std::uint64_t x = 0;

    Matching(int n_, std::uint64_t x_) : n(n_), x(x_) {
        if (x == 0) {
            throw DegenerateMatchingError("Matching: x = 0 gives self-loops");
        }
    }

    // The 2^{n-1} edges as (y, y xor x) with y < y xor x.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges() const {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
        out.reserve(std::size_t{1} << (n - 1));
        for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
            if (y < (y ^ x)) {
                out.emplace_back(y, y ^ x);
            }
        }
        return out;
    }
};

// Alice holds f, Bob holds x; Bob must output an edge of M_x with the
// correct f-parity.
struct HmInstance {
    BoolFunc f;
    std::uint64_t x = 0;
};

// Canonical answer: endpoints ordered, parity claimed for the edge.
struct HmAnswer {
    std::uint64_t y1 = 0;
    std::uint64_t y2 = 0;
    int parity = 0;

    static HmAnswer canonical(std::uint64_t a, std::uint64_t b, int parity) {
        return HmAnswer{std::min(a, b), std::max(a, b), parity};
    }

    bool operator==(const HmAnswer &) const = default;
};

inline bool answer_correct(const HmInstance &inst, const HmAnswer &ans) {
    if ((ans.y1 ^ ans.y2) != inst.x) {
        return false;
    }
    return ans.parity == (inst.f.query(ans.y1) ^ inst.f.query(ans.y2));
}

// Quantum protocol: Alice sends one copy of |psi_f>; Bob measures Pi_x.
// Always correct.
inline HmAnswer hm_quantum(const HmInstance &inst, Rng &rng, int cap = kMaxSimQubits) {
    const MatchingCircuit c = build_ux(inst.x, inst.f.n());
    const ConceptSample s = measure_concept(c, inst.f, rng, cap);
    return HmAnswer::canonical(s.y, s.y ^ inst.x, s.b);
}

// Exact probability mass the quantum protocol assigns to outcomes that
// decode outside R_f(x).
inline double hm_invalid_mass(const HmInstance &inst, int cap = kMaxSimQubits) {
    const MatchingCircuit c = build_ux(inst.x, inst.f.n());
    StateVector s = prepare_phase_state(inst.f, cap);
    apply_matching_circuit(s, c);
    const auto born = outcome_distribution(s);
    double invalid = 0.0;
    for (std::uint64_t w = 0; w < born.size(); ++w) {
        auto [y0, b] = decode_outcome(c, w);
        if (!in_relation(inst.f, inst.x, y0, b)) {
            invalid += born[w];
        }
    }
    return invalid;
}

// Alice's side of the classical contrast arm: `budget_pairs` uniformly
// chosen distinct (index, f(index)) pairs, n+1 bits each. Repeats carry no
// information, so indices are drawn without replacement; once the budget
// covers the domain the payload is the full table (padded to the stated
// cost with uniform redraws).
inline std::vector<std::pair<std::uint64_t, int>> alice_classical_payload(int budget_pairs,
                                                                          const BoolFunc &f,
                                                                          Rng &rng) {
    const std::uint64_t domain = f.domain_size();
    std::vector<std::pair<std::uint64_t, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(budget_pairs));
    if (static_cast<std::uint64_t>(budget_pairs) >= domain) {
        for (std::uint64_t y = 0; y < domain; ++y) {
            pairs.emplace_back(y, f.query(y));
        }
        for (std::uint64_t i = domain; i < static_cast<std::uint64_t>(budget_pairs); ++i) {
            const std::uint64_t y = rng.next_bits(f.n());
            pairs.emplace_back(y, f.query(y));
        }
        return pairs;
    }
    std::unordered_map<std::uint64_t, int> chosen;
    while (chosen.size() < static_cast<std::size_t>(budget_pairs)) {
        const std::uint64_t y = rng.next_bits(f.n());
        if (chosen.emplace(y, f.query(y)).second) {
            pairs.emplace_back(y, f.query(y));
        }
    }
    return pairs;
}

inline BitVec pack_classical_payload(const std::vector<std::pair<std::uint64_t, int>> &pairs,
                                     int n) {
    BitVec bits(pairs.size() * (static_cast<std::size_t>(n) + 1));
    std::size_t off = 0;
    for (const auto &[y, v] : pairs) {
        for (int j = 0; j < n; ++j) {
            bits.set(off + static_cast<std::size_t>(j), static_cast<int>((y >> j) & 1u));
        }
        bits.set(off + static_cast<std::size_t>(n), v);
        off += static_cast<std::size_t>(n) + 1;
    }
    return bits;
}

// Bob's side: answer a fully known edge of M_x when one exists, otherwise
// guess the parity of a random edge.
inline HmAnswer bob_classical_answer(std::uint64_t x, int n,
                                     const std::vector<std::pair<std::uint64_t, int>> &pairs,
                                     Rng &rng) {
    std::unordered_map<std::uint64_t, int> received;
    for (const auto &[y, v] : pairs) {
        received.emplace(y, v);
    }
    for (const auto &[y, v] : pairs) {
        const auto other = received.find(y ^ x);
        if (other != received.end()) {
            return HmAnswer::canonical(y, y ^ x, v ^ other->second);
        }
    }
    const std::uint64_t y = rng.next_bits(n);
    return HmAnswer::canonical(y, y ^ x, rng.coin());
}

// Classical contrast arm end to end.
inline HmAnswer hm_classical_baseline(int budget_pairs, const HmInstance &inst, Rng &rng) {
    if (budget_pairs < 2) {
        throw ConfigError("hm_classical_baseline: budget must be >= 2 pairs");
    }
    const auto pairs = alice_classical_payload(budget_pairs, inst.f, rng);
    return bob_classical_answer(inst.x, inst.f.n(), pairs, rng);
}

// Bob's side of the Thm.-2 reduction. Takes only his own input x, the
// strategy description, and Alice's transmitted bits; f never enters.
inline HmAnswer hm_reduction_bob(std::uint64_t x, int n, const Strategy &strategy,
                                 int train_examples, const FSource &f_source,
                                 const ClassicalRep &alice_payload, Rng &rng) {
    std::vector<std::pair<ClassicalRep, Label>> data;
    data.reserve(static_cast<std::size_t>(train_examples));
    for (int i = 0; i < train_examples; ++i) {
        BoolFunc fi = f_source.draw(n, rng);
        ClassicalRep rep = measure(strategy, fi, strategy.ell, rng);
        Label label;
        label.mode = LabelMode::FullX;
        label.full = concept_sample(fi, x, rng);
        data.emplace_back(std::move(rep), label);
    }
    const MfGenerator gen = measure_first_learn(strategy, data);
    const ConceptSample s = mf_generate(gen, alice_payload, rng);
    return HmAnswer::canonical(s.y, s.y ^ x, s.b);
}

struct HmReductionResult {
    HmAnswer answer;
    std::int64_t sent_bits = 0;
    ClassicalRep payload;
};

// Turns the measure-first protocol into a one-way HM protocol: Bob builds
// T_x^M locally (he knows x), Alice transmits psi_hat_f = M(|psi_f>), Bob
// answers from the trained generator. Communication cost is exactly m.
inline HmReductionResult reduce_measure_first(const Strategy &strategy, int train_examples,
                                              const FSource &f_source, const HmInstance &inst,
                                              Rng &rng) {
    const int n = inst.f.n();
    Rng alice_rng = rng.child(1);
    Rng bob_rng = rng.child(2);
    HmReductionResult out;
    out.payload = measure(strategy, inst.f, strategy.ell, alice_rng);
    out.sent_bits = out.payload.m;
    out.answer = hm_reduction_bob(inst.x, n, strategy, train_examples, f_source, out.payload,
                                  bob_rng);
    return out;
}

struct HmQuantumProtocol {};
struct HmClassicalProtocol {
    int budget_pairs = 2;
};
struct HmReductionProtocol {
    Strategy strategy;
    int train_examples = 3;
    FSource f_source = FSource::uniform();
};
struct HmRandomGuessProtocol {};

using HmProtocol =
    std::variant<HmQuantumProtocol, HmClassicalProtocol, HmReductionProtocol, HmRandomGuessProtocol>;

inline std::string hm_protocol_name(const HmProtocol &p) {
    if (std::holds_alternative<HmQuantumProtocol>(p)) {
        return "quantum";
    }
    if (const auto *c = std::get_if<HmClassicalProtocol>(&p)) {
        return "classical:c=" + std::to_string(c->budget_pairs);
    }
    if (const auto *r = std::get_if<HmReductionProtocol>(&p)) {
        return std::string("reduction:") + r->strategy.id();
    }
    return "guess";
}

struct HmRun {
    HmAnswer answer;
    std::int64_t sent_bits = 0;
    BitVec payload;  // classical bits that crossed the channel, if any
};

inline HmRun run_hm_protocol(const HmProtocol &protocol, const HmInstance &inst, Rng &rng) {
    if (std::holds_alternative<HmQuantumProtocol>(protocol)) {
        // One copy of |psi_f> crosses the channel; no classical bits.
        return {hm_quantum(inst, rng), 0, BitVec()};
    }
    if (const auto *c = std::get_if<HmClassicalProtocol>(&protocol)) {
        if (c->budget_pairs < 2) {
            throw ConfigError("hm_classical_baseline: budget must be >= 2 pairs");
        }
        const auto pairs = alice_classical_payload(c->budget_pairs, inst.f, rng);
        HmRun run;
        run.payload = pack_classical_payload(pairs, inst.f.n());
        run.sent_bits = static_cast<std::int64_t>(run.payload.size());
        run.answer = bob_classical_answer(inst.x, inst.f.n(), pairs, rng);
        return run;
    }
    if (const auto *r = std::get_if<HmReductionProtocol>(&protocol)) {
        HmReductionResult res =
            reduce_measure_first(r->strategy, r->train_examples, r->f_source, inst, rng);
        return {res.answer, res.sent_bits, std::move(res.payload.bits)};
    }
    const std::uint64_t y = rng.next_bits(inst.f.n());
    return {HmAnswer::canonical(y, y ^ inst.x, rng.coin()), 0, BitVec()};
}

struct SuccessEstimate {
    double rate = 0.0;
    Interval ci;
    int trials = 0;
    double mean_sent_bits = 0.0;
};

struct HmTranscript {
    int n = 0;
    std::uint64_t x = 0;
    BitVec f_table;
    BitVec payload;
    HmAnswer answer;
    bool correct = false;
};

// Monte Carlo success rate under mu: Alice's f uniform over truth tables,
// Bob's x uniform over the N-1 nonzero strings (x = 0 is not a perfect
// matching and is excluded from the family).
inline SuccessEstimate estimate_success(const HmProtocol &protocol, int n, int trials, Rng &rng,
                                        std::vector<HmTranscript> *transcripts = nullptr) {
    if (trials < 1) {
        throw ConfigError("estimate_success: trials must be >= 1");
    }
    std::size_t correct = 0;
    double sent = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng trial_rng = rng.child(static_cast<std::uint64_t>(t));
        HmInstance inst{BoolFunc::random_table(n, trial_rng), trial_rng.next_nonzero_bits(n)};
        const HmRun run = run_hm_protocol(protocol, inst, trial_rng);
        const bool ok = answer_correct(inst, run.answer);
        if (ok) {
            ++correct;
        }
        sent += static_cast<double>(run.sent_bits);
        if (transcripts != nullptr) {
            transcripts->push_back(
                HmTranscript{n, inst.x, inst.f.table(), run.payload, run.answer, ok});
        }
    }
    SuccessEstimate est;
    est.trials = trials;
    est.rate = static_cast<double>(correct) / static_cast<double>(trials);
    est.ci = wilson_interval(correct, static_cast<std::size_t>(trials));
    est.mean_sent_bits = sent / static_cast<double>(trials);
    return est;
}

} // namespace qlsep
