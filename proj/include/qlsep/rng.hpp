#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "qlsep/errors.hpp"

namespace qlsep {

// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed-split function used everywhere: master seed -> per-experiment ->
// per-trial. Children with distinct lanes are independent streams, so
// trial results do not depend on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t lane) {
    return mix64(parent ^ mix64(lane ^ 0xa5a5a5a5a5a5a5a5ULL));
}

// FNV-1a, for deriving seed lanes from strings.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// mt19937_64 wrapper. All draws go through the helpers below instead of
// std::*_distribution, whose output is implementation-defined; results must
// be reproducible from the seed alone.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) {
            throw DimensionError("next_below: bound must be positive");
        }
        if ((bound & (bound - 1)) == 0) {
            return gen_() & (bound - 1);
        }
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound) - 1;
        std::uint64_t v = gen_();
        while (v > limit) {
            v = gen_();
        }
        return v % bound;
    }

    int coin() { return static_cast<int>(gen_() & 1u); }

    // Uniform n-bit string as an integer, n <= 64.
    std::uint64_t next_bits(int n) {
        if (n <= 0) {
            return 0;
        }
        if (n >= 64) {
            return gen_();
        }
        return gen_() >> (64 - n);
    }

    // Uniform nonzero n-bit string.
    std::uint64_t next_nonzero_bits(int n) {
        std::uint64_t v = next_bits(n);
        while (v == 0) {
            v = next_bits(n);
        }
        return v;
    }

    Rng child(std::uint64_t lane) const { return Rng(derive_seed(seed_, lane)); }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Index sample from an unnormalized weight vector via inverse CDF.
inline std::size_t sample_index(const std::vector<double> &weights, Rng &rng) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    double u = rng.next_unit() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
            return i;
        }
    }
    return weights.size() - 1;
}

} // namespace qlsep
