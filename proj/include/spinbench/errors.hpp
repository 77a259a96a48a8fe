#pragma once

#include <stdexcept>
#include <string>

namespace spinbench {

// Error categories map onto CLI exit codes (see tools/spinbench.cpp).

/// Malformed or inconsistent input data.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input is well formed but violates a solver precondition
/// (biases for the exact solver, nonplanar topology, odd node count, ...).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rejection or attempt budget ran out.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spinbench
