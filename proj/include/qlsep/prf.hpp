#pragma once

#include <cstdint>
#include <string>

#include "qlsep/bitvec.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/rng.hpp"

namespace qlsep {

// Keyed Boolean function family backing efficiently preparable phase states.
// Construction "sm64": the input point is packed into a 64-bit block
// (domain-separated by n), then passed through one keyed mixing round per
// 64-bit key word, v -> mix64(v ^ k_r), and truncated to the low bit. Each
// round is a bijection on 64-bit blocks, so the block transform is a keyed
// permutation with a fixed key schedule. Quantum security is an assumption
// of the construction, not something this code tests.
struct PrfSpec {
    int key_bits = 128;                  // must be a positive multiple of 64
    std::string construction = "sm64";
    std::string version = "qprf-v1";
};

inline BitVec sample_key(const PrfSpec &spec, Rng &rng) {
    if (spec.key_bits <= 0 || spec.key_bits % 64 != 0) {
        throw ConfigError("PrfSpec: key_bits must be a positive multiple of 64");
    }
    return BitVec::random(static_cast<std::size_t>(spec.key_bits), rng);
}

// Fast path: y given as a packed n-bit integer.
inline int prf_eval(const PrfSpec &spec, const BitVec &key, std::uint64_t y, int n) {
    if (key.size() != static_cast<std::size_t>(spec.key_bits)) {
        throw DimensionError("prf_eval: key length does not match spec");
    }
    std::uint64_t v = y ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n));
    for (std::uint64_t k : key.words()) {
        v = mix64(v ^ k);
    }
    return static_cast<int>(v & 1u);
}

inline int prf_eval(const PrfSpec &spec, const BitVec &key, const BitVec &y) {
    if (y.size() > 64) {
        throw DimensionError("prf_eval: inputs longer than 64 bits unsupported");
    }
    return prf_eval(spec, key, y.to_u64(), static_cast<int>(y.size()));
}

} // namespace qlsep
