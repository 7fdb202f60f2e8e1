#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qlsep/bitvec.hpp"
#include "qlsep/errors.hpp"

namespace qlsep {

// A system of parity constraints coeff . x = rhs over GF(2).
struct Gf2System {
    std::size_t n = 0;
    std::vector<std::pair<BitVec, int>> rows;

    void add_row(BitVec coeff, int rhs) {
        if (coeff.size() != n) {
            throw DimensionError("Gf2System::add_row: coefficient length != n");
        }
        rows.emplace_back(std::move(coeff), rhs & 1);
    }
};

enum class Gf2Status { Solved, Underdetermined, Inconsistent };

struct Gf2Solution {
    Gf2Status status = Gf2Status::Underdetermined;
    BitVec x;              // valid when status == Solved
    std::size_t rank = 0;  // coefficient rank in all cases
};

// Gauss-Jordan elimination with first-nonzero pivoting. Deterministic:
// identical input yields identical output. Inconsistency (a 0 = 1 row)
// takes precedence over rank deficiency.
inline Gf2Solution solve_system(const Gf2System &sys) {
    if (sys.rows.empty()) {
        throw DimensionError("solve_system: system has no rows");
    }
    const std::size_t n = sys.n;
    auto rows = sys.rows;

    std::size_t rank = 0;
    std::vector<std::size_t> pivot_col_of_row;
    for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot].first.get(col) == 0) {
            ++pivot;
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && rows[r].first.get(col) == 1) {
                rows[r].first ^= rows[rank].first;
                rows[r].second ^= rows[rank].second;
            }
        }
        pivot_col_of_row.push_back(col);
        ++rank;
    }

    for (std::size_t r = rank; r < rows.size(); ++r) {
        if (!rows[r].first.any() && rows[r].second == 1) {
            return {Gf2Status::Inconsistent, BitVec(), rank};
        }
    }
    if (rank < n) {
        return {Gf2Status::Underdetermined, BitVec(), rank};
    }

    BitVec x(n);
    for (std::size_t r = 0; r < rank; ++r) {
        x.set(pivot_col_of_row[r], rows[r].second);
    }
    return {Gf2Status::Solved, std::move(x), rank};
}

// Row rank over GF(2). Empty input has rank 0.
inline std::size_t gf2_rank(const std::vector<BitVec> &input_rows) {
    if (input_rows.empty()) {
        return 0;
    }
    const std::size_t n = input_rows.front().size();
    for (const auto &r : input_rows) {
        if (r.size() != n) {
            throw DimensionError("gf2_rank: rows have mixed lengths");
        }
    }
    auto rows = input_rows;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot].get(col) == 0) {
            ++pivot;
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r].get(col) == 1) {
                rows[r] ^= rows[rank];
            }
        }
        ++rank;
    }
    return rank;
}

} // namespace qlsep
