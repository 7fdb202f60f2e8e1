#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qlsep/concepts.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/fq_learner.hpp"
#include "qlsep/statevector.hpp"

namespace qlsep {

enum class StrategyKind { PauliShadows, FourierSampling, LeakyFullTable };

inline const char *strategy_kind_id(StrategyKind k) {
    switch (k) {
    case StrategyKind::PauliShadows:
        return "pauli-shadows";
    case StrategyKind::FourierSampling:
        return "fourier";
    default:
        return "leaky-full-table";
    }
}

// A fixed randomized measurement strategy. Every parameter is pinned before
// any label or target concept is seen; measure() takes no label input, so a
// strategy cannot depend on x by construction. The leaky strategy records f
// verbatim (m = 2^n bits) and exists as a budget-violating control arm.
struct Strategy {
    StrategyKind kind = StrategyKind::PauliShadows;
    int ell = 1;               // copy budget
    std::uint64_t seed = 0;    // folded into each call's snapshot stream
    bool leaky_override = false;

    static Strategy pauli_shadows(int ell, std::uint64_t seed) {
        return Strategy{StrategyKind::PauliShadows, ell, seed, false};
    }
    static Strategy fourier(int ell, std::uint64_t seed) {
        return Strategy{StrategyKind::FourierSampling, ell, seed, false};
    }
    static Strategy leaky(int ell, bool override_flag) {
        return Strategy{StrategyKind::LeakyFullTable, ell, 0, override_flag};
    }

    const char *id() const { return strategy_kind_id(kind); }

    // m = record size in bits: 3 bits per qubit per copy for shadows
    // (2-bit basis + outcome), n bits per copy for Fourier sampling,
    // 2^n for the leaky table.
    std::int64_t rep_bits(int n) const {
        switch (kind) {
        case StrategyKind::PauliShadows:
            return std::int64_t{3} * n * ell;
        case StrategyKind::FourierSampling:
            return std::int64_t{1} * n * ell;
        default:
            return std::int64_t{1} << n;
        }
    }
};

inline constexpr const char *kRepLayoutVersion = "v1";

// The m-bit classical representation psi_hat_f produced by a strategy.
struct ClassicalRep {
    std::string strategy_id;
    std::string layout = kRepLayoutVersion;
    int n = 0;
    int ell = 0;
    std::int64_t m = 0;
    BitVec bits;

    // Shadow layout v1: 3 bits per (copy, qubit) at offset 3*(t*n + q):
    // two basis bits (0 = X, 1 = Y, 2 = Z) then the outcome bit.
    int shadow_basis(int t, int q) const {
        const std::size_t off = 3 * (static_cast<std::size_t>(t) * n + q);
        return bits.get(off) | (bits.get(off + 1) << 1);
    }
    int shadow_outcome(int t, int q) const {
        const std::size_t off = 3 * (static_cast<std::size_t>(t) * n + q);
        return bits.get(off + 2);
    }

    // Fourier layout v1: copy t occupies bits [t*n, (t+1)*n) as a basis label.
    std::uint64_t fourier_outcome(int t) const {
        std::uint64_t w = 0;
        const std::size_t off = static_cast<std::size_t>(t) * n;
        for (int q = 0; q < n; ++q) {
            w |= static_cast<std::uint64_t>(bits.get(off + q)) << q;
        }
        return w;
    }
};

namespace detail {

// Rotates qubit q so that a Z measurement reads out the requested Pauli
// basis: H for X, H after S-dagger for Y, identity for Z.
inline void apply_basis_rotation(StateVector &s, int q, int basis) {
    if (basis == 2) {
        return;
    }
    const std::uint64_t bit = std::uint64_t{1} << q;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (i & bit) {
            continue;
        }
        const cplx a0 = s.amps[i];
        const cplx a1 = s.amps[i | bit];
        if (basis == 0) {
            s.amps[i] = (a0 + a1) * inv_sqrt2;
            s.amps[i | bit] = (a0 - a1) * inv_sqrt2;
        } else {
            const cplx ia1{-a1.imag(), a1.real()};  // i * a1
            s.amps[i] = (a0 - ia1) * inv_sqrt2;
            s.amps[i | bit] = (a0 + ia1) * inv_sqrt2;
        }
    }
}

} // namespace detail

// Applies the strategy M to ell copies of |psi_f>. The record is a function
// of (strategy, f, ell, call seed) only; fresh calls draw fresh snapshot
// randomness so repeated measurements of the same state are independent.
inline ClassicalRep measure(const Strategy &strategy, const BoolFunc &f, int ell, Rng &rng,
                            int cap = kMaxSimQubits) {
    if (ell != strategy.ell) {
        throw DimensionError("measure: ell does not match the strategy copy budget");
    }
    if (strategy.kind == StrategyKind::LeakyFullTable && !strategy.leaky_override) {
        throw BudgetError("measure: leaky-full-table strategy requires the budget override");
    }
    const int n = f.n();
    ClassicalRep rep;
    rep.strategy_id = strategy.id();
    rep.n = n;
    rep.ell = ell;
    rep.m = strategy.rep_bits(n);

    if (strategy.kind == StrategyKind::LeakyFullTable) {
        rep.bits = f.to_table();
        return rep;
    }

    rep.bits = BitVec(static_cast<std::size_t>(rep.m));
    Rng local(derive_seed(strategy.seed, rng.next_u64()));
    const StateVector base = prepare_phase_state(f, cap);
    StateVector scratch;
    scratch.n = n;

    if (strategy.kind == StrategyKind::PauliShadows) {
        for (int t = 0; t < ell; ++t) {
            scratch.amps = base.amps;
            std::vector<int> bases(static_cast<std::size_t>(n));
            for (int q = 0; q < n; ++q) {
                bases[q] = static_cast<int>(local.next_below(3));
                detail::apply_basis_rotation(scratch, q, bases[q]);
            }
            const std::uint64_t w = sample_outcome(scratch, local);
            for (int q = 0; q < n; ++q) {
                const std::size_t off = 3 * (static_cast<std::size_t>(t) * n + q);
                rep.bits.set(off, bases[q] & 1);
                rep.bits.set(off + 1, (bases[q] >> 1) & 1);
                rep.bits.set(off + 2, static_cast<int>((w >> q) & 1u));
            }
        }
        return rep;
    }

    // Fourier sampling: H^{tensor n} then measure, once per copy.
    for (int t = 0; t < ell; ++t) {
        scratch.amps = base.amps;
        for (int q = 0; q < n; ++q) {
            apply_h(scratch, q);
        }
        const std::uint64_t w = sample_outcome(scratch, local);
        const std::size_t off = static_cast<std::size_t>(t) * n;
        for (int q = 0; q < n; ++q) {
            rep.bits.set(off + q, static_cast<int>((w >> q) & 1u));
        }
    }
    return rep;
}

namespace detail {

// <c|v><v|c'> building block for the inverse-channel estimator, where v is
// the measured eigenstate of the recorded basis.
inline cplx eigenstate_amp(int basis, int outcome, int c) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (basis) {
    case 0:  // X: v = (|0> + (-1)^o |1>)/sqrt(2)
        return c == 0 ? cplx{inv_sqrt2, 0.0}
                      : cplx{outcome ? -inv_sqrt2 : inv_sqrt2, 0.0};
    case 1:  // Y: v = (|0> + i(-1)^o |1>)/sqrt(2)
        return c == 0 ? cplx{inv_sqrt2, 0.0}
                      : cplx{0.0, outcome ? -inv_sqrt2 : inv_sqrt2};
    default:  // Z: v = |o>
        return c == outcome ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    }
}

// Single-snapshot estimate of <psi| (|y><y^x| + |y^x><y|) |psi> from the
// standard inverse channel rho_hat = tensor_q (3 v_q v_q^dagger - I).
inline double snapshot_parity_estimate(const ClassicalRep &rep, int t, std::uint64_t y,
                                       std::uint64_t x) {
    const std::uint64_t yp = y ^ x;
    cplx prod{1.0, 0.0};
    for (int q = 0; q < rep.n; ++q) {
        const int basis = rep.shadow_basis(t, q);
        const int outcome = rep.shadow_outcome(t, q);
        const int cy = static_cast<int>((y >> q) & 1u);
        const int cyp = static_cast<int>((yp >> q) & 1u);
        const cplx factor = 3.0 * eigenstate_amp(basis, outcome, cyp) *
                                std::conj(eigenstate_amp(basis, outcome, cy)) -
                            (cy == cyp ? cplx{1.0, 0.0} : cplx{0.0, 0.0});
        prod *= factor;
        if (prod == cplx{0.0, 0.0}) {
            return 0.0;
        }
    }
    return 2.0 * prod.real();
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    if (k % 2 == 1) {
        return v[k / 2];
    }
    return 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

} // namespace detail

inline constexpr int kMedianOfMeansGroups = 10;

// Estimate of <psi_f| (|y><y^x| + |y^x><y|) |psi_f> averaged over the ell
// snapshots; the true value is (2/N)(-1)^{f(y) xor f(y^x)}. The plain
// snapshot mean, so the estimator is exactly unbiased over measurement
// randomness.
inline double shadow_estimate_parity(const ClassicalRep &rep, std::uint64_t y, std::uint64_t x) {
    if (rep.strategy_id != strategy_kind_id(StrategyKind::PauliShadows)) {
        throw StrategyMismatchError("shadow_estimate_parity: rep is not a Pauli-shadow record");
    }
    double acc = 0.0;
    for (int t = 0; t < rep.ell; ++t) {
        acc += detail::snapshot_parity_estimate(rep, t, y, x);
    }
    return acc / static_cast<double>(rep.ell);
}

// Median-of-means variant (k contiguous groups); the generator's sign
// decisions use this for outlier robustness. Not mean-unbiased, unlike the
// plain average above.
inline double shadow_estimate_parity_mom(const ClassicalRep &rep, std::uint64_t y,
                                         std::uint64_t x, int groups = kMedianOfMeansGroups) {
    if (rep.strategy_id != strategy_kind_id(StrategyKind::PauliShadows)) {
        throw StrategyMismatchError("shadow_estimate_parity: rep is not a Pauli-shadow record");
    }
    const int k = std::max(1, std::min(groups, rep.ell));
    std::vector<double> means(static_cast<std::size_t>(k), 0.0);
    for (int g = 0; g < k; ++g) {
        const int lo = static_cast<int>(static_cast<std::int64_t>(rep.ell) * g / k);
        const int hi = static_cast<int>(static_cast<std::int64_t>(rep.ell) * (g + 1) / k);
        double acc = 0.0;
        for (int t = lo; t < hi; ++t) {
            acc += detail::snapshot_parity_estimate(rep, t, y, x);
        }
        means[g] = acc / static_cast<double>(hi - lo);
    }
    return detail::median_of(std::move(means));
}

// Most frequent Fourier-sampling outcome; ties break toward the smallest
// label. For f close to a linear function a.y + c this recovers a, and
// b = f(y) xor f(y^x) = a.x for exactly linear f.
inline std::uint64_t fourier_mode(const ClassicalRep &rep) {
    if (rep.strategy_id != strategy_kind_id(StrategyKind::FourierSampling)) {
        throw StrategyMismatchError("fourier_mode: rep is not a Fourier-sampling record");
    }
    std::vector<std::uint64_t> outcomes;
    outcomes.reserve(static_cast<std::size_t>(rep.ell));
    for (int t = 0; t < rep.ell; ++t) {
        outcomes.push_back(rep.fourier_outcome(t));
    }
    std::sort(outcomes.begin(), outcomes.end());
    std::uint64_t best = outcomes.front();
    std::size_t best_count = 0;
    std::size_t i = 0;
    while (i < outcomes.size()) {
        std::size_t j = i;
        while (j < outcomes.size() && outcomes[j] == outcomes[i]) {
            ++j;
        }
        if (j - i > best_count) {
            best_count = j - i;
            best = outcomes[i];
        }
        i = j;
    }
    return best;
}

// The learner-output side of a measure-first protocol: a recovered x plus
// the strategy-appropriate inference rule. Consumes only classical
// representations at inference time.
struct MfGenerator {
    int n = 0;
    std::uint64_t x = 0;
    StrategyKind kind = StrategyKind::PauliShadows;
    std::string strategy_id;
    int mom_groups = kMedianOfMeansGroups;
};

// Trains the measure-first learner A on (psi_hat, label) pairs: recover x
// from the labels, then fix the inference rule for the strategy at hand.
inline MfGenerator measure_first_learn(const Strategy &strategy,
                                       const std::vector<std::pair<ClassicalRep, Label>> &data) {
    if (data.empty()) {
        throw InsufficientDataError("measure_first_learn: empty training data");
    }
    const int n = data.front().first.n;
    const LabelMode mode = data.front().second.mode;
    std::vector<Label> labels;
    labels.reserve(data.size());
    for (const auto &[rep, label] : data) {
        if (rep.strategy_id != strategy.id()) {
            throw StrategyMismatchError("measure_first_learn: rep from a different strategy");
        }
        labels.push_back(label);
    }
    MfGenerator gen;
    gen.n = n;
    gen.x = recover_x(labels, mode, n);
    gen.kind = strategy.kind;
    gen.strategy_id = strategy.id();
    return gen;
}

namespace detail {

// b estimate for a given y, plus whether it was a coin toss (shadow tie).
struct BEstimate {
    int b = 0;
    bool tie = false;
};

inline BEstimate mf_estimate_b(const MfGenerator &gen, const ClassicalRep &rep, std::uint64_t y) {
    switch (gen.kind) {
    case StrategyKind::PauliShadows: {
        const double e = shadow_estimate_parity_mom(rep, y, gen.x, gen.mom_groups);
        if (e > 0.0) {
            return {0, false};
        }
        if (e < 0.0) {
            return {1, false};
        }
        return {0, true};
    }
    case StrategyKind::FourierSampling:
        return {dot_u64(fourier_mode(rep), gen.x), false};
    default: {
        const int fy = rep.bits.get(static_cast<std::size_t>(y));
        const int fyx = rep.bits.get(static_cast<std::size_t>(y ^ gen.x));
        return {fy ^ fyx, false};
    }
    }
}

} // namespace detail

// Emits one sample (x, y, b_hat) from the trained generator on a fresh
// classical representation. Houses pi_tilde_x(f) conditioned on the rep.
inline ConceptSample mf_generate(const MfGenerator &gen, const ClassicalRep &rep, Rng &rng) {
    if (rep.strategy_id != gen.strategy_id) {
        throw StrategyMismatchError("mf_generate: rep from a different strategy");
    }
    ConceptSample s;
    s.n = gen.n;
    s.x = gen.x;
    s.y = rng.next_bits(gen.n);
    const auto est = detail::mf_estimate_b(gen, rep, s.y);
    s.b = est.tie ? rng.coin() : est.b;
    return s;
}

// Exact output distribution of mf_generate conditioned on the rep: y is
// uniform, b_hat is deterministic given (rep, y) except for shadow ties,
// which split the mass evenly.
inline ConceptDistribution mf_exact_distribution(const MfGenerator &gen,
                                                 const ClassicalRep &rep) {
    if (rep.strategy_id != gen.strategy_id) {
        throw StrategyMismatchError("mf_exact_distribution: rep from a different strategy");
    }
    if (gen.n > kMaxExactQubits) {
        throw CapacityError("mf_exact_distribution: exact mode supports n <= 12");
    }
    ConceptDistribution d;
    d.n = gen.n;
    d.x = gen.x;
    d.p.assign(std::size_t{1} << (gen.n + 1), 0.0);
    const double mass = 1.0 / static_cast<double>(std::uint64_t{1} << gen.n);
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << gen.n); ++y) {
        const auto est = detail::mf_estimate_b(gen, rep, y);
        if (est.tie) {
            d.at(y, 0) += 0.5 * mass;
            d.at(y, 1) += 0.5 * mass;
        } else {
            d.at(y, est.b) += mass;
        }
    }
    return d;
}

} // namespace qlsep
