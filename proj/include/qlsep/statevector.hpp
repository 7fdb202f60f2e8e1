#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "qlsep/boolfunc.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/rng.hpp"

namespace qlsep {

using cplx = std::complex<double>;

// Dense statevectors above 14 qubits are out of scope; every experiment in
// this project fits under the cap.
inline constexpr int kMaxSimQubits = 14;
inline constexpr double kNormTol = 1e-10;

// Dense n-qubit state. amps[i] is the amplitude of basis state |i> with the
// project-wide little-endian bit order (qubit q of label i is (i >> q) & 1).
struct StateVector {
    int n = 0;
    std::vector<cplx> amps;

    static StateVector zero_state(int n, int cap = kMaxSimQubits) {
        check_qubits(n, cap);
        StateVector s;
        s.n = n;
        s.amps.assign(std::size_t{1} << n, cplx{0.0, 0.0});
        s.amps[0] = 1.0;
        return s;
    }

    static StateVector basis_state(int n, std::uint64_t label, int cap = kMaxSimQubits) {
        StateVector s = zero_state(n, cap);
        s.amps[0] = 0.0;
        s.amps.at(static_cast<std::size_t>(label)) = 1.0;
        return s;
    }

    std::size_t dim() const { return amps.size(); }

    double norm_sq() const {
        double t = 0.0;
        for (const auto &a : amps) {
            t += std::norm(a);
        }
        return t;
    }

    static void check_qubits(int n, int cap = kMaxSimQubits) {
        if (n < 1) {
            throw DimensionError("StateVector: need at least one qubit");
        }
        if (n > cap) {
            throw CapacityError("StateVector: qubit count exceeds simulator cap");
        }
    }
};

struct HGate {
    int q;
};
struct XGate {
    int q;
};
struct ZGate {
    int q;
};
struct CnotGate {
    int control;
    int target;
};
// Diagonal +-1 oracle: amp_y -> (-1)^{f(y)} amp_y. Kept as a first-class
// gate; compiling f to elementary gates would add nothing testable.
struct PhaseOracleGate {
    BoolFunc f;
};

using GateOp = std::variant<HGate, XGate, ZGate, CnotGate, PhaseOracleGate>;

namespace detail {
inline void check_qubit_index(const StateVector &s, int q, const char *what) {
    if (q < 0 || q >= s.n) {
        throw DimensionError(std::string(what) + ": qubit index out of range");
    }
}
} // namespace detail

inline void apply_h(StateVector &s, int q) {
    detail::check_qubit_index(s, q, "apply_h");
    const std::uint64_t bit = std::uint64_t{1} << q;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (i & bit) {
            continue;
        }
        const cplx a0 = s.amps[i];
        const cplx a1 = s.amps[i | bit];
        s.amps[i] = (a0 + a1) * inv_sqrt2;
        s.amps[i | bit] = (a0 - a1) * inv_sqrt2;
    }
}

inline void apply_x(StateVector &s, int q) {
    detail::check_qubit_index(s, q, "apply_x");
    const std::uint64_t bit = std::uint64_t{1} << q;
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (!(i & bit)) {
            std::swap(s.amps[i], s.amps[i | bit]);
        }
    }
}

inline void apply_z(StateVector &s, int q) {
    detail::check_qubit_index(s, q, "apply_z");
    const std::uint64_t bit = std::uint64_t{1} << q;
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (i & bit) {
            s.amps[i] = -s.amps[i];
        }
    }
}

inline void apply_cnot(StateVector &s, int control, int target) {
    detail::check_qubit_index(s, control, "apply_cnot");
    detail::check_qubit_index(s, target, "apply_cnot");
    if (control == target) {
        throw DimensionError("apply_cnot: control and target coincide");
    }
    const std::uint64_t cbit = std::uint64_t{1} << control;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(s.amps[i], s.amps[i | tbit]);
        }
    }
}

inline void apply_phase_oracle(StateVector &s, const BoolFunc &f) {
    if (f.n() != s.n) {
        throw DimensionError("apply_phase_oracle: function arity != qubit count");
    }
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (f.query(i)) {
            s.amps[i] = -s.amps[i];
        }
    }
}

inline void apply_gate(StateVector &s, const GateOp &op) {
    std::visit(
        [&s](const auto &g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, HGate>) {
                apply_h(s, g.q);
            } else if constexpr (std::is_same_v<T, XGate>) {
                apply_x(s, g.q);
            } else if constexpr (std::is_same_v<T, ZGate>) {
                apply_z(s, g.q);
            } else if constexpr (std::is_same_v<T, CnotGate>) {
                apply_cnot(s, g.control, g.target);
            } else {
                apply_phase_oracle(s, g.f);
            }
        },
        op);
}

// Born-rule outcome distribution: p_i = |amp_i|^2.
inline std::vector<double> outcome_distribution(const StateVector &s) {
    std::vector<double> p(s.dim());
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        p[i] = std::norm(s.amps[i]);
    }
    return p;
}

// One computational-basis measurement outcome, as a packed basis label.
inline std::uint64_t sample_outcome(const StateVector &s, Rng &rng) {
    const double u = rng.next_unit();
    double acc = 0.0;
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        acc += std::norm(s.amps[i]);
        if (u < acc) {
            return i;
        }
    }
    return s.dim() - 1;
}

} // namespace qlsep
