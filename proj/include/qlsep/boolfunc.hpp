#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "qlsep/bitvec.hpp"
#include "qlsep/errors.hpp"
#include "qlsep/prf.hpp"
#include "qlsep/rng.hpp"

namespace qlsep {

// Explicit truth tables above n = 24 would exceed 16 MiB packed.
inline constexpr int kMaxTableQubits = 24;

// A Boolean function f: {0,1}^n -> {0,1}, backed by an explicit truth table
// or by a PRF key. The two backings are interchangeable for every consumer:
// only query() behavior matters. Cheap to copy (shared immutable backing).
class BoolFunc {
  public:
    static BoolFunc from_table(int n, BitVec table) {
        check_table_n(n);
        if (table.size() != (std::size_t{1} << n)) {
            throw DimensionError("BoolFunc::from_table: table length != 2^n");
        }
        BoolFunc f;
        f.n_ = n;
        f.table_ = std::make_shared<const BitVec>(std::move(table));
        return f;
    }

    static BoolFunc random_table(int n, Rng &rng) {
        check_table_n(n);
        return from_table(n, BitVec::random(std::size_t{1} << n, rng));
    }

    static BoolFunc prf_backed(int n, PrfSpec spec, BitVec key) {
        if (key.size() != static_cast<std::size_t>(spec.key_bits)) {
            throw DimensionError("BoolFunc::prf_backed: key length does not match spec");
        }
        BoolFunc f;
        f.n_ = n;
        f.prf_ = std::make_shared<const PrfBacking>(PrfBacking{std::move(spec), std::move(key)});
        return f;
    }

    int n() const { return n_; }

    std::uint64_t domain_size() const { return std::uint64_t{1} << n_; }

    int query(std::uint64_t y) const {
        if (table_) {
            return table_->get(static_cast<std::size_t>(y));
        }
        return prf_eval(prf_->spec, prf_->key, y, n_);
    }

    bool is_prf_backed() const { return prf_ != nullptr; }

    const BitVec &table() const {
        if (!table_) {
            throw Error("BoolFunc::table: function is PRF-backed");
        }
        return *table_;
    }

    const PrfSpec &prf_spec() const { return prf_->spec; }
    const BitVec &prf_key() const { return prf_->key; }

    // Materializes the truth table (exhaustive evaluation for PRF backings).
    BitVec to_table() const {
        if (table_) {
            return *table_;
        }
        check_table_n(n_);
        BitVec t(std::size_t{1} << n_);
        for (std::uint64_t y = 0; y < domain_size(); ++y) {
            t.set(static_cast<std::size_t>(y), query(y));
        }
        return t;
    }

  private:
    struct PrfBacking {
        PrfSpec spec;
        BitVec key;
    };

    static void check_table_n(int n) {
        if (n < 1 || n > kMaxTableQubits) {
            throw CapacityError("BoolFunc: explicit tables support 1 <= n <= 24");
        }
    }

    int n_ = 0;
    std::shared_ptr<const BitVec> table_;
    std::shared_ptr<const PrfBacking> prf_;
};

} // namespace qlsep
