#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "qlsep/concepts.hpp"
#include "qlsep/fq_learner.hpp"
#include "qlsep/gf2.hpp"
#include "qlsep/prf.hpp"
#include "qlsep/rng.hpp"
#include "qlsep/statevector.hpp"

namespace qlsep {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verify_detail {

inline StateVector random_state(int n, Rng &rng) {
    StateVector s;
    s.n = n;
    s.amps.resize(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &a : s.amps) {
        a = cplx{2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0};
        norm += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm);
    for (auto &a : s.amps) {
        a *= inv;
    }
    return s;
}

inline double max_amp_diff(const StateVector &a, const StateVector &b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i) {
        worst = std::max(worst, std::abs(a.amps[i] - b.amps[i]));
    }
    return worst;
}

inline CheckResult make_result(const std::string &name, bool pass, const std::string &detail) {
    return CheckResult{name, pass, detail};
}

} // namespace verify_detail

// dot(a xor b, c) = dot(a, c) xor dot(b, c) on random triples.
inline CheckResult check_gf2_bilinearity(Rng rng, int trials = 2000) {
    for (int t = 0; t < trials; ++t) {
        const std::size_t len = 1 + rng.next_below(200);
        const BitVec a = BitVec::random(len, rng);
        const BitVec b = BitVec::random(len, rng);
        const BitVec c = BitVec::random(len, rng);
        if (dot(a ^ b, c) != (dot(a, c) ^ dot(b, c))) {
            return {"gf2_bilinearity", false, "counterexample at len " + std::to_string(len)};
        }
    }
    return {"gf2_bilinearity", true, std::to_string(trials) + " random triples"};
}

// Rank is invariant under row permutation and row-xor replacement, and
// under row duplication.
inline CheckResult check_gf2_rank_invariance(Rng rng, int trials = 500) {
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 1 + rng.next_below(24);
        const std::size_t count = 1 + rng.next_below(24);
        std::vector<BitVec> rows;
        for (std::size_t i = 0; i < count; ++i) {
            rows.push_back(BitVec::random(n, rng));
        }
        const std::size_t base = gf2_rank(rows);

        auto shuffled = rows;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
        }
        if (gf2_rank(shuffled) != base) {
            return {"gf2_rank_invariance", false, "permutation changed rank"};
        }

        if (count >= 2) {
            auto xored = rows;
            const std::size_t i = rng.next_below(count);
            std::size_t j = rng.next_below(count);
            while (j == i) {
                j = rng.next_below(count);
            }
            xored[i] ^= xored[j];
            if (gf2_rank(xored) != base) {
                return {"gf2_rank_invariance", false, "row xor changed rank"};
            }
        }

        auto dup = rows;
        dup.push_back(rows[rng.next_below(count)]);
        if (gf2_rank(dup) != base) {
            return {"gf2_rank_invariance", false, "duplication changed rank"};
        }
    }
    return {"gf2_rank_invariance", true, std::to_string(trials) + " random row sets"};
}

// solve_system on random full-rank square systems returns x satisfying
// every row.
inline CheckResult check_gf2_solve_resubstitution(Rng rng, int trials = 10000) {
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 1 + rng.next_below(16);
        Gf2System sys;
        sys.n = n;
        const BitVec secret = BitVec::random(n, rng);
        std::vector<BitVec> rows;
        while (gf2_rank(rows) < n) {
            rows.push_back(BitVec::random(n, rng));
        }
        for (const auto &coeff : rows) {
            sys.add_row(coeff, dot(coeff, secret));
        }
        const Gf2Solution sol = solve_system(sys);
        if (sol.status != Gf2Status::Solved) {
            return {"gf2_solve_resubstitution", false, "full-rank system not solved"};
        }
        for (const auto &[coeff, rhs] : sys.rows) {
            if (dot(coeff, sol.x) != rhs) {
                return {"gf2_solve_resubstitution", false, "solution violates a row"};
            }
        }
        if (!(sol.x == secret)) {
            return {"gf2_solve_resubstitution", false, "solution differs from planted secret"};
        }
    }
    return {"gf2_solve_resubstitution", true, std::to_string(trials) + " full-rank systems"};
}

// Norm preservation for all gate kinds on randomized states.
inline CheckResult check_sv_norm_preservation(Rng rng, int trials = 200) {
    for (int t = 0; t < trials; ++t) {
        const int n = 1 + static_cast<int>(rng.next_below(10));
        StateVector s = verify_detail::random_state(n, rng);
        const int q = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        switch (rng.next_below(5)) {
        case 0:
            apply_h(s, q);
            break;
        case 1:
            apply_x(s, q);
            break;
        case 2:
            apply_z(s, q);
            break;
        case 3: {
            if (n >= 2) {
                int tq = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
                while (tq == q) {
                    tq = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
                }
                apply_cnot(s, q, tq);
            }
            break;
        }
        default:
            apply_phase_oracle(s, BoolFunc::random_table(n, rng));
            break;
        }
        if (std::abs(s.norm_sq() - 1.0) > 1e-12) {
            return {"sv_norm_preservation", false, "norm drifted at n=" + std::to_string(n)};
        }
    }
    return {"sv_norm_preservation", true, std::to_string(trials) + " random (state, gate) pairs"};
}

// H, CNOT and PhaseOracle are involutions.
inline CheckResult check_sv_involutions(Rng rng, int trials = 100) {
    for (int t = 0; t < trials; ++t) {
        const int n = 2 + static_cast<int>(rng.next_below(7));
        const StateVector original = verify_detail::random_state(n, rng);

        StateVector s = original;
        const int q = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        apply_h(s, q);
        apply_h(s, q);
        if (verify_detail::max_amp_diff(s, original) > 1e-12) {
            return {"sv_involutions", false, "H twice != identity"};
        }

        s = original;
        int tq = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        while (tq == q) {
            tq = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        }
        apply_cnot(s, q, tq);
        apply_cnot(s, q, tq);
        if (verify_detail::max_amp_diff(s, original) > 1e-12) {
            return {"sv_involutions", false, "CNOT twice != identity"};
        }

        s = original;
        const BoolFunc f = BoolFunc::random_table(n, rng);
        apply_phase_oracle(s, f);
        apply_phase_oracle(s, f);
        if (verify_detail::max_amp_diff(s, original) > 1e-12) {
            return {"sv_involutions", false, "PhaseOracle twice != identity"};
        }
    }
    return {"sv_involutions", true, std::to_string(trials) + " random states"};
}

// Empirical sampling frequencies converge to the Born distribution within
// 4-sigma binomial bounds.
inline CheckResult check_sv_sample_frequencies(Rng rng, int draws = 100000) {
    const int n = 3;
    StateVector s = verify_detail::random_state(n, rng);
    const auto p = outcome_distribution(s);
    std::vector<int> counts(p.size(), 0);
    for (int t = 0; t < draws; ++t) {
        ++counts[sample_outcome(s, rng)];
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double expect = p[i] * draws;
        const double sigma = std::sqrt(std::max(1.0, p[i] * (1.0 - p[i]) * draws));
        if (std::abs(counts[i] - expect) > 4.0 * sigma) {
            return {"sv_sample_frequencies", false,
                    "outcome " + std::to_string(i) + " off by more than 4 sigma"};
        }
    }
    return {"sv_sample_frequencies", true, std::to_string(draws) + " draws, 4-sigma bound"};
}

namespace verify_detail {

// Independent membership predicate on a materialized table: direct bit
// reads, no BoolFunc query path.
inline bool table_relation_holds(const BitVec &table, std::uint64_t x, std::uint64_t y, int b) {
    const int fy = table.get(static_cast<std::size_t>(y));
    const int fyx = table.get(static_cast<std::size_t>(y ^ x));
    return (fy ^ fyx) == b;
}

inline bool relation_matches_bruteforce(const BoolFunc &f, std::uint64_t x) {
    const BitVec table = f.to_table();
    const auto members = relation_members(f, x);
    if (members.size() != f.domain_size()) {
        return false;
    }
    // Set equality: every returned pair is a member, every (y, b) in the
    // brute-force set is returned, and nothing else is.
    std::vector<int> seen(f.domain_size(), 0);
    for (const auto &[y, b] : members) {
        if (!table_relation_holds(table, x, y, b)) {
            return false;
        }
        if (seen[static_cast<std::size_t>(y)]++) {
            return false;
        }
    }
    for (std::uint64_t y = 0; y < f.domain_size(); ++y) {
        for (int b = 0; b <= 1; ++b) {
            const bool expected = table_relation_holds(table, x, y, b);
            const bool returned = relation_b(f, x, y) == b;
            if (expected != returned) {
                return false;
            }
        }
    }
    return true;
}

} // namespace verify_detail

// relation_members vs independent brute force, exhaustively for every
// function at n <= 3 and on random functions at n = 10.
inline CheckResult check_relation_bruteforce(Rng rng, int random_f = 1000) {
    for (int n = 1; n <= 3; ++n) {
        const std::uint64_t num_f = std::uint64_t{1} << (std::uint64_t{1} << n);
        for (std::uint64_t ftab = 0; ftab < num_f; ++ftab) {
            const BoolFunc f =
                BoolFunc::from_table(n, BitVec::from_u64(ftab, std::size_t{1} << n));
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
                if (!verify_detail::relation_matches_bruteforce(f, x)) {
                    return {"relation_bruteforce", false,
                            "mismatch at n=" + std::to_string(n) + " f=" + std::to_string(ftab)};
                }
            }
        }
    }
    const int n = 10;
    for (int t = 0; t < random_f; ++t) {
        const BoolFunc f = BoolFunc::random_table(n, rng);
        const std::uint64_t x = rng.next_bits(n);
        if (!verify_detail::relation_matches_bruteforce(f, x)) {
            return {"relation_bruteforce", false, "mismatch at n=10"};
        }
    }
    return {"relation_bruteforce", true,
            "exhaustive n<=3 plus " + std::to_string(random_f) + " random f at n=10"};
}

// concept_distribution: y-marginal uniform, b deterministic given y, total
// mass exactly 1.
inline CheckResult check_concept_marginals(Rng rng, int trials = 200) {
    for (int t = 0; t < trials; ++t) {
        const int n = 1 + static_cast<int>(rng.next_below(8));
        const BoolFunc f = BoolFunc::random_table(n, rng);
        const std::uint64_t x = rng.next_bits(n);
        const ConceptDistribution d = concept_distribution(f, x);
        const double expect = 1.0 / static_cast<double>(f.domain_size());
        double total = 0.0;
        for (std::uint64_t y = 0; y < f.domain_size(); ++y) {
            const double m0 = d.at(y, 0);
            const double m1 = d.at(y, 1);
            total += m0 + m1;
            if (std::abs(m0 + m1 - expect) > 1e-15) {
                return {"concept_marginals", false, "y-marginal not uniform"};
            }
            if (m0 != 0.0 && m1 != 0.0) {
                return {"concept_marginals", false, "b not deterministic given y"};
            }
        }
        if (std::abs(total - 1.0) > 1e-12) {
            return {"concept_marginals", false, "mass does not sum to 1"};
        }
    }
    return {"concept_marginals", true, std::to_string(trials) + " random (f, x)"};
}

// TV metric axioms on random distribution triples.
inline CheckResult check_tv_axioms(Rng rng, int trials = 2000) {
    for (int t = 0; t < trials; ++t) {
        const std::size_t k = 2 + rng.next_below(64);
        auto draw = [&](void) {
            std::vector<double> p(k);
            double total = 0.0;
            for (auto &v : p) {
                v = rng.next_unit();
                total += v;
            }
            for (auto &v : p) {
                v /= total;
            }
            return p;
        };
        const auto p = draw();
        const auto q = draw();
        const auto r = draw();
        const double pq = tv_distance(p, q);
        const double qp = tv_distance(q, p);
        if (std::abs(pq - qp) > 1e-15) {
            return {"tv_axioms", false, "symmetry violated"};
        }
        if (pq < 0.0 || pq > 1.0 + 1e-15) {
            return {"tv_axioms", false, "range violated"};
        }
        if (tv_distance(p, p) != 0.0) {
            return {"tv_axioms", false, "identity violated"};
        }
        if (pq > tv_distance(p, r) + tv_distance(r, q) + 1e-12) {
            return {"tv_axioms", false, "triangle inequality violated"};
        }
    }
    return {"tv_axioms", true, std::to_string(trials) + " random triples"};
}

namespace verify_detail {

// Closed-form matching-basis Born probabilities against the simulated
// statevector: for the edge through y0 (pivot bit clear), outcome w with
// w_p = b has probability (1 + (-1)^{b + f(y0) xor f(y0^x)}) / N.
inline bool born_probabilities_match(const BoolFunc &f, std::uint64_t x, double tol) {
    const MatchingCircuit c = build_ux(x, f.n());
    StateVector s = prepare_phase_state(f);
    apply_matching_circuit(s, c);
    const auto born = outcome_distribution(s);
    const double inv_n = 1.0 / static_cast<double>(f.domain_size());
    for (std::uint64_t u = 0; u < f.domain_size(); ++u) {
        if ((u >> c.pivot) & 1u) {
            continue;  // u enumerates pivot-cleared edge representatives
        }
        const std::uint64_t y0 = c.label_map(u);
        const int parity = f.query(y0) ^ f.query(y0 ^ x);
        const double sign = parity ? -1.0 : 1.0;
        const double p_plus = (1.0 + sign) * inv_n;   // decode b = 0
        const double p_minus = (1.0 - sign) * inv_n;  // decode b = 1
        if (std::abs(born[u] - p_plus) > tol) {
            return false;
        }
        if (std::abs(born[u | (std::uint64_t{1} << c.pivot)] - p_minus) > tol) {
            return false;
        }
    }
    return true;
}

} // namespace verify_detail

// Matching-basis Born rule, exhaustive f at n <= 3 and random f at n <= 6.
inline CheckResult check_born_edge_probabilities(Rng rng, int random_trials = 300) {
    for (int n = 1; n <= 3; ++n) {
        const std::uint64_t num_f = std::uint64_t{1} << (std::uint64_t{1} << n);
        for (std::uint64_t ftab = 0; ftab < num_f; ++ftab) {
            const BoolFunc f =
                BoolFunc::from_table(n, BitVec::from_u64(ftab, std::size_t{1} << n));
            for (std::uint64_t x = 1; x < (std::uint64_t{1} << n); ++x) {
                if (!verify_detail::born_probabilities_match(f, x, 1e-9)) {
                    return {"born_edge_probabilities", false,
                            "mismatch at n=" + std::to_string(n)};
                }
            }
        }
    }
    for (int t = 0; t < random_trials; ++t) {
        const int n = 4 + static_cast<int>(rng.next_below(3));
        const BoolFunc f = BoolFunc::random_table(n, rng);
        const std::uint64_t x = rng.next_nonzero_bits(n);
        if (!verify_detail::born_probabilities_match(f, x, 1e-9)) {
            return {"born_edge_probabilities", false, "mismatch at n=" + std::to_string(n)};
        }
    }
    return {"born_edge_probabilities", true,
            "exhaustive n<=3 plus " + std::to_string(random_trials) + " random f at n in 4..6"};
}

// PRF-backed and explicit-table backings of the same function produce
// identical phase states and relation members.
inline CheckResult check_backing_equivalence(Rng rng, int trials = 50) {
    PrfSpec spec;
    for (int t = 0; t < trials; ++t) {
        const int n = 1 + static_cast<int>(rng.next_below(10));
        const BoolFunc prf_f = BoolFunc::prf_backed(n, spec, sample_key(spec, rng));
        const BoolFunc tab_f = BoolFunc::from_table(n, prf_f.to_table());
        const StateVector a = prepare_phase_state(prf_f);
        const StateVector b = prepare_phase_state(tab_f);
        if (verify_detail::max_amp_diff(a, b) != 0.0) {
            return {"backing_equivalence", false, "phase states differ"};
        }
        const std::uint64_t x = rng.next_bits(n);
        if (relation_members(prf_f, x) != relation_members(tab_f, x)) {
            return {"backing_equivalence", false, "relation members differ"};
        }
    }
    return {"backing_equivalence", true, std::to_string(trials) + " PRF/table pairs, n<=10"};
}

// Output balance, avalanche and first-order key/input correlations of the
// PRF family, each within 4 sigma at 1e5 samples.
inline CheckResult check_prf_battery(Rng rng, int samples = 100000) {
    PrfSpec spec;
    const int n = 16;
    const double sigma = 0.5 / std::sqrt(static_cast<double>(samples));
    const double bound = 4.0 * sigma;

    long ones = 0;
    for (int t = 0; t < samples; ++t) {
        const BitVec key = sample_key(spec, rng);
        ones += prf_eval(spec, key, rng.next_bits(n), n);
    }
    const double balance = static_cast<double>(ones) / samples;
    if (std::abs(balance - 0.5) > bound) {
        return {"prf_battery", false, "output balance " + std::to_string(balance)};
    }

    long flips = 0;
    for (int t = 0; t < samples; ++t) {
        const BitVec key = sample_key(spec, rng);
        const std::uint64_t y = rng.next_bits(n);
        const std::uint64_t y2 = y ^ (std::uint64_t{1} << rng.next_below(n));
        flips += prf_eval(spec, key, y, n) ^ prf_eval(spec, key, y2, n);
    }
    const double avalanche = static_cast<double>(flips) / samples;
    if (std::abs(avalanche - 0.5) > bound) {
        return {"prf_battery", false, "avalanche rate " + std::to_string(avalanche)};
    }

    // First-order correlations: output against each input bit and each of
    // the first 16 key bits.
    std::vector<long> input_corr(n, 0);
    std::vector<long> key_corr(16, 0);
    for (int t = 0; t < samples; ++t) {
        const BitVec key = sample_key(spec, rng);
        const std::uint64_t y = rng.next_bits(n);
        const int out = prf_eval(spec, key, y, n);
        for (int j = 0; j < n; ++j) {
            input_corr[j] += out ^ static_cast<int>((y >> j) & 1u);
        }
        for (int j = 0; j < 16; ++j) {
            key_corr[j] += out ^ key.get(static_cast<std::size_t>(j));
        }
    }
    for (int j = 0; j < n; ++j) {
        if (std::abs(static_cast<double>(input_corr[j]) / samples - 0.5) > bound) {
            return {"prf_battery", false, "input-bit correlation at bit " + std::to_string(j)};
        }
    }
    for (int j = 0; j < 16; ++j) {
        if (std::abs(static_cast<double>(key_corr[j]) / samples - 0.5) > bound) {
            return {"prf_battery", false, "key-bit correlation at bit " + std::to_string(j)};
        }
    }
    return {"prf_battery", true,
            std::to_string(samples) + " samples: balance, avalanche, correlations"};
}

// The complete suite behind the `verify` subcommand.
inline std::vector<CheckResult> run_verify_suite(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<CheckResult> results;
    results.push_back(check_gf2_bilinearity(rng.child(1)));
    results.push_back(check_gf2_rank_invariance(rng.child(2)));
    results.push_back(check_gf2_solve_resubstitution(rng.child(3)));
    results.push_back(check_sv_norm_preservation(rng.child(4)));
    results.push_back(check_sv_involutions(rng.child(5)));
    results.push_back(check_sv_sample_frequencies(rng.child(6)));
    results.push_back(check_relation_bruteforce(rng.child(7)));
    results.push_back(check_concept_marginals(rng.child(8)));
    results.push_back(check_tv_axioms(rng.child(9)));
    results.push_back(check_born_edge_probabilities(rng.child(10)));
    results.push_back(check_backing_equivalence(rng.child(11)));
    results.push_back(check_prf_battery(rng.child(12)));
    return results;
}

} // namespace qlsep
