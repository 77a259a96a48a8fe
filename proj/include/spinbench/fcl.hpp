#pragma once

// Frustrated-cluster-loop instances with a planted all-up ground state.
//
// Each loop is a simple cycle from a non-backtracking random walk; every
// cycle edge gets J -= 1 except one uniformly chosen edge which gets J += 1.
// A loop whose addition would push some |J| above rho is rejected whole, so
// the uniform configuration stays optimal for every loop simultaneously.

#include <cstdint>
#include <utility>
#include <vector>

#include "spinbench/ising.hpp"
#include "spinbench/random.hpp"
#include "spinbench/topology.hpp"

namespace spinbench::fcl {

struct FclParams {
    double alpha = 1.0;  // loops per variable
    int rho = 3;         // precision: max |J| on any edge
    int ruggedness = 3;  // R >= rho, recorded for reporting
    std::uint64_t seed = 0;
    long max_loop_rejections = 10000;  // consecutive rejections before the build is discarded
    int max_instance_rejections = 1000;  // discarded builds (disconnected or stuck) before giving up

    /// Throws InputError unless alpha > 0 and 1 <= rho <= R.
    void validate() const;
    int loop_count(int nodes) const;
};

struct Loop {
    std::vector<int> nodes;                  // cyclic order; edge k joins nodes[k], nodes[k+1 mod L]
    std::vector<std::pair<int, int>> edges;  // (u, v) with u < v, aligned with nodes
    int antiferromagnetic_edge = 0;          // index into edges
};

/// Throws BudgetExhausted when no cycle is found within max_attempts walks.
Loop sample_loop(const topology::TopologyGraph& graph, Rng& rng, int max_attempts = 10000);

IsingInstance generate_fcl(const topology::TopologyGraph& graph, const FclParams& params);

/// Energy of the planted configuration.  Throws InputError when absent.
Decimal planted_energy(const IsingInstance& instance);

/// Nodes with a nonzero coupling form one connected component.
bool coupling_graph_connected(const IsingInstance& instance);

}  // namespace spinbench::fcl
