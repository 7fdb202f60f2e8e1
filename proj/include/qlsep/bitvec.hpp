#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "qlsep/errors.hpp"
#include "qlsep/rng.hpp"

namespace qlsep {

// Bit-packed vector over GF(2). Little-endian bit order throughout the
// project: bit j of the integer i is (i >> j) & 1, and bit k of a BitVec
// lives in word k/64 at position k%64. Bits beyond len are kept zero.
class BitVec {
  public:
    BitVec() = default;

    explicit BitVec(std::size_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BitVec from_u64(std::uint64_t value, std::size_t len) {
        BitVec v(len);
        if (len > 0 && !v.words_.empty()) {
            v.words_[0] = len >= 64 ? value : (value & ((std::uint64_t{1} << len) - 1));
        }
        return v;
    }

    static BitVec random(std::size_t len, Rng &rng) {
        BitVec v(len);
        for (auto &w : v.words_) {
            w = rng.next_u64();
        }
        v.mask_tail();
        return v;
    }

    std::size_t size() const { return len_; }

    bool empty() const { return len_ == 0; }

    int get(std::size_t i) const {
        if (i >= len_) {
            throw DimensionError("BitVec::get: index out of range");
        }
        return static_cast<int>((words_[i >> 6] >> (i & 63)) & 1u);
    }

    void set(std::size_t i, int bit) {
        if (i >= len_) {
            throw DimensionError("BitVec::set: index out of range");
        }
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (bit) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    std::uint64_t to_u64() const {
        if (len_ > 64) {
            throw DimensionError("BitVec::to_u64: vector longer than 64 bits");
        }
        return words_.empty() ? 0 : words_[0];
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : words_) {
            c += static_cast<std::size_t>(std::popcount(w));
        }
        return c;
    }

    int parity() const { return static_cast<int>(popcount() & 1u); }

    bool any() const {
        for (auto w : words_) {
            if (w != 0) {
                return true;
            }
        }
        return false;
    }

    BitVec &operator^=(const BitVec &other) {
        if (other.len_ != len_) {
            throw DimensionError("BitVec::operator^=: length mismatch");
        }
        for (std::size_t i = 0; i < words_.size(); ++i) {
            words_[i] ^= other.words_[i];
        }
        return *this;
    }

    friend BitVec operator^(BitVec a, const BitVec &b) {
        a ^= b;
        return a;
    }

    bool operator==(const BitVec &other) const = default;

    const std::vector<std::uint64_t> &words() const { return words_; }

    std::vector<std::uint64_t> &mutable_words() { return words_; }

    void mask_tail() {
        if (len_ % 64 != 0 && !words_.empty()) {
            words_.back() &= (std::uint64_t{1} << (len_ % 64)) - 1;
        }
    }

  private:
    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

// GF(2) inner product: sum_j a_j * b_j mod 2.
inline int dot(const BitVec &a, const BitVec &b) {
    if (a.size() != b.size()) {
        throw DimensionError("dot: length mismatch");
    }
    std::uint64_t acc = 0;
    const auto &aw = a.words();
    const auto &bw = b.words();
    for (std::size_t i = 0; i < aw.size(); ++i) {
        acc ^= aw[i] & bw[i];
    }
    return static_cast<int>(std::popcount(acc) & 1u);
}

// Parity of (a AND b) for word-sized vectors, used in hot loops.
constexpr int dot_u64(std::uint64_t a, std::uint64_t b) {
    return static_cast<int>(std::popcount(a & b) & 1u);
}

} // namespace qlsep
