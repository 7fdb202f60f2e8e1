#pragma once

#include <stdexcept>
#include <string>

namespace qlsep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operands live in incompatible spaces (vector lengths, qubit indices,
// distribution sizes).
struct DimensionError : Error {
    using Error::Error;
};

// Requested size exceeds a hard cap (simulator qubit cap, truth-table cap).
struct CapacityError : Error {
    using Error::Error;
};

// Training labels contradict each other.
struct CorruptDataError : Error {
    using Error::Error;
};

// Not enough labels to pin down x; the caller may supply more examples.
struct InsufficientDataError : Error {
    using Error::Error;
};

// x = 0 induces self-loop "edges"; no matching circuit exists.
struct DegenerateMatchingError : Error {
    using Error::Error;
};

// A classical representation was fed to a consumer built for a different
// measurement strategy.
struct StrategyMismatchError : Error {
    using Error::Error;
};

// A strategy would exceed the classical-bit budget without an explicit
// override.
struct BudgetError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace qlsep
