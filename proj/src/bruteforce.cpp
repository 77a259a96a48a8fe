#include "spinbench/bruteforce.hpp"

#include <bit>
#include <string>

namespace spinbench {

ExhaustiveResult exhaustive_ground_state(const IsingInstance& instance, int max_spins) {
    const int n = instance.n;
    if (n > max_spins) {
        throw PreconditionError("brute force limited to n <= " + std::to_string(max_spins) + " spins, got " +
                                std::to_string(n));
    }
    const Adjacency adj(instance);
    std::vector<std::int64_t> h(static_cast<std::size_t>(n), 0);
    for (const auto& b : instance.biases) h[static_cast<std::size_t>(b.i)] += b.value;

    std::vector<std::int8_t> s(static_cast<std::size_t>(n), 1);
    std::int64_t e = energy_scaled(instance, s);
    std::vector<std::int8_t> best = s;
    std::int64_t best_e = e;
    const std::uint64_t total = n == 0 ? 1 : std::uint64_t{1} << n;
    // Gray code: step k flips the lowest set bit of k.
    for (std::uint64_t k = 1; k < total; ++k) {
        const int i = std::countr_zero(k);
        std::int64_t f = h[static_cast<std::size_t>(i)];
        for (const auto& entry : adj.sites[static_cast<std::size_t>(i)]) f += entry.coupling * s[static_cast<std::size_t>(entry.neighbor)];
        e += -2 * s[static_cast<std::size_t>(i)] * f;
        s[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-s[static_cast<std::size_t>(i)]);
        if (e < best_e) {
            best_e = e;
            best = s;
        }
    }
    return {SpinConfiguration(std::move(best)), best_e, Decimal{best_e, instance.denominator}, total};
}

}  // namespace spinbench
