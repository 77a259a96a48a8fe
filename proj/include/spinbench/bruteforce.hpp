#pragma once

#include <cstdint>

#include "spinbench/ising.hpp"

namespace spinbench {

inline constexpr int kBruteForceMaxSpins = 24;

struct ExhaustiveResult {
    SpinConfiguration config;  // first minimiser in Gray-code order from all +1
    std::int64_t energy_scaled = 0;
    Decimal energy;
    std::uint64_t states = 0;  // configurations visited
};

/// Exact minimum over all 2^n configurations.  Throws PreconditionError
/// when n exceeds max_spins.
ExhaustiveResult exhaustive_ground_state(const IsingInstance& instance, int max_spins = kBruteForceMaxSpins);

}  // namespace spinbench
