#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qlsep/boolfunc.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/prf.hpp"
#include "qlsep/rng.hpp"
#include "qlsep/statevector.hpp"

namespace qlsep {

// Exact distributions over {0,1}^{2n+1} are materialized only up to n = 12.
inline constexpr int kMaxExactQubits = 12;

// A labeled outcome (x, y, b). x and y are packed n-bit labels; the triple
// serializes to exactly 2n+1 bits (x in bits [0,n), y in [n,2n), b at 2n).
struct ConceptSample {
    int n = 0;
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    int b = 0;

    bool operator==(const ConceptSample &) const = default;

    BitVec to_bits() const {
        BitVec v(2 * static_cast<std::size_t>(n) + 1);
        for (int j = 0; j < n; ++j) {
            v.set(j, static_cast<int>((x >> j) & 1u));
            v.set(n + j, static_cast<int>((y >> j) & 1u));
        }
        v.set(2 * static_cast<std::size_t>(n), b);
        return v;
    }

    static ConceptSample from_bits(const BitVec &v, int n) {
        if (v.size() != 2 * static_cast<std::size_t>(n) + 1) {
            throw DimensionError("ConceptSample::from_bits: need exactly 2n+1 bits");
        }
        ConceptSample s;
        s.n = n;
        for (int j = 0; j < n; ++j) {
            s.x |= static_cast<std::uint64_t>(v.get(j)) << j;
            s.y |= static_cast<std::uint64_t>(v.get(n + j)) << j;
        }
        s.b = v.get(2 * static_cast<std::size_t>(n));
        return s;
    }
};

enum class LabelMode { FullX, Parity };

inline const char *label_mode_name(LabelMode m) {
    return m == LabelMode::FullX ? "full-x" : "parity";
}

// FullX labels carry a complete concept sample; Parity labels carry
// (i . x, i) for a fresh uniform i, n+1 bits (parity bit first, then i).
struct Label {
    LabelMode mode = LabelMode::FullX;
    ConceptSample full;              // FullX
    std::uint64_t parity_i = 0;      // Parity
    int parity_bit = 0;              // Parity

    BitVec to_bits(int n) const {
        if (mode == LabelMode::FullX) {
            return full.to_bits();
        }
        BitVec v(static_cast<std::size_t>(n) + 1);
        v.set(0, parity_bit);
        for (int j = 0; j < n; ++j) {
            v.set(1 + j, static_cast<int>((parity_i >> j) & 1u));
        }
        return v;
    }

    static Label from_bits(LabelMode mode, const BitVec &v, int n) {
        Label l;
        l.mode = mode;
        if (mode == LabelMode::FullX) {
            l.full = ConceptSample::from_bits(v, n);
            return l;
        }
        if (v.size() != static_cast<std::size_t>(n) + 1) {
            throw DimensionError("Label::from_bits: parity label needs n+1 bits");
        }
        l.parity_bit = v.get(0);
        for (int j = 0; j < n; ++j) {
            l.parity_i |= static_cast<std::uint64_t>(v.get(1 + j)) << j;
        }
        return l;
    }
};

// One training example: the phase-state handle (f plus copy count ell) and
// its label. ell identical copies of a known pure state are a multiplicity,
// never a joint 2^{n*ell} state.
struct TrainingExample {
    BoolFunc f;
    int ell = 1;
    Label label;
};

struct FSource {
    enum class Kind { UniformRandom, PrfKeys };
    Kind kind = Kind::UniformRandom;
    PrfSpec prf;

    static FSource uniform() { return FSource{Kind::UniformRandom, PrfSpec{}}; }
    static FSource prf_keys(PrfSpec spec) { return FSource{Kind::PrfKeys, std::move(spec)}; }

    BoolFunc draw(int n, Rng &rng) const {
        if (kind == Kind::UniformRandom) {
            return BoolFunc::random_table(n, rng);
        }
        return BoolFunc::prf_backed(n, prf, sample_key(prf, rng));
    }

    const char *name() const { return kind == Kind::UniformRandom ? "uniform" : "prf"; }
};

// |psi_f> = (1/sqrt(N)) sum_i (-1)^{f(i)} |i>.
inline StateVector prepare_phase_state(const BoolFunc &f, int cap = kMaxSimQubits) {
    StateVector::check_qubits(f.n(), cap);
    StateVector s;
    s.n = f.n();
    const std::uint64_t dim = std::uint64_t{1} << f.n();
    const double a = 1.0 / std::sqrt(static_cast<double>(dim));
    s.amps.resize(dim);
    for (std::uint64_t i = 0; i < dim; ++i) {
        s.amps[i] = f.query(i) ? -a : a;
    }
    return s;
}

// b such that (y, b) is the member of R_f(x) at this y.
inline int relation_b(const BoolFunc &f, std::uint64_t x, std::uint64_t y) {
    return f.query(y) ^ f.query(y ^ x);
}

// All 2^n members of R_f(x), one (y, b) per y, ordered by y.
inline std::vector<std::pair<std::uint64_t, int>> relation_members(const BoolFunc &f,
                                                                   std::uint64_t x) {
    std::vector<std::pair<std::uint64_t, int>> out;
    out.reserve(f.domain_size());
    for (std::uint64_t y = 0; y < f.domain_size(); ++y) {
        out.emplace_back(y, relation_b(f, x, y));
    }
    return out;
}

inline bool in_relation(const BoolFunc &f, std::uint64_t x, std::uint64_t y, int b) {
    return relation_b(f, x, y) == b;
}

// A distribution over samples (x, y, b) with the first field fixed to x.
// p is indexed by (y << 1) | b; every triple with a different first field
// carries zero mass.
struct ConceptDistribution {
    int n = 0;
    std::uint64_t x = 0;
    std::vector<double> p;  // size 2^{n+1}

    double total_mass() const {
        double t = 0.0;
        for (double v : p) {
            t += v;
        }
        return t;
    }

    double &at(std::uint64_t y, int b) { return p[(y << 1) | static_cast<std::uint64_t>(b)]; }
    double at(std::uint64_t y, int b) const {
        return p[(y << 1) | static_cast<std::uint64_t>(b)];
    }
};

// pi_x(f): probability 2^{-n} on (x, y, b) for each (y, b) in R_f(x).
inline ConceptDistribution concept_distribution(const BoolFunc &f, std::uint64_t x) {
    if (f.n() > kMaxExactQubits) {
        throw CapacityError("concept_distribution: exact mode supports n <= 12");
    }
    ConceptDistribution d;
    d.n = f.n();
    d.x = x;
    d.p.assign(std::size_t{1} << (f.n() + 1), 0.0);
    const double mass = 1.0 / static_cast<double>(f.domain_size());
    for (std::uint64_t y = 0; y < f.domain_size(); ++y) {
        d.at(y, relation_b(f, x, y)) = mass;
    }
    return d;
}

// One draw from pi_x(f): y uniform, b forced by the relation.
inline ConceptSample concept_sample(const BoolFunc &f, std::uint64_t x, Rng &rng) {
    ConceptSample s;
    s.n = f.n();
    s.x = x;
    s.y = rng.next_bits(f.n());
    s.b = relation_b(f, x, s.y);
    return s;
}

// Total variation distance (1/2) sum |p_i - q_i| over a shared outcome space.
inline double tv_distance(const std::vector<double> &p, const std::vector<double> &q) {
    if (p.size() != q.size()) {
        throw DimensionError("tv_distance: distributions live on different spaces");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += std::abs(p[i] - q[i]);
    }
    return 0.5 * acc;
}

// TV over {0,1}^{2n+1}. Distributions with different first fields have
// disjoint supports.
inline double tv_distance(const ConceptDistribution &p, const ConceptDistribution &q) {
    if (p.n != q.n) {
        throw DimensionError("tv_distance: distributions live on different spaces");
    }
    if (p.x != q.x) {
        return 0.5 * (p.total_mass() + q.total_mass());
    }
    return tv_distance(p.p, q.p);
}

// Training data per Def.-3 shape: each example holds an independent f and a
// label. Parity labels use a fresh uniform i per example.
inline std::vector<TrainingExample> generate_training_data(std::uint64_t x, int count, int ell,
                                                           LabelMode mode,
                                                           const FSource &f_source, int n,
                                                           Rng &rng) {
    if (count < 1 || ell < 1) {
        throw DimensionError("generate_training_data: count and ell must be >= 1");
    }
    std::vector<TrainingExample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        TrainingExample ex;
        ex.f = f_source.draw(n, rng);
        ex.ell = ell;
        ex.label.mode = mode;
        if (mode == LabelMode::FullX) {
            ex.label.full = concept_sample(ex.f, x, rng);
        } else {
            ex.label.parity_i = rng.next_bits(n);
            ex.label.parity_bit = dot_u64(ex.label.parity_i, x);
        }
        out.push_back(std::move(ex));
    }
    return out;
}

} // namespace qlsep
