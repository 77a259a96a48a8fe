#pragma once

// Graph builders for the Chimera hardware graph, the logical square lattice
// obtained by contracting each K4,4 cell, and the anticluster lattice
// obtained by contracting inter-cell couplers instead.
//
// Chimera node ids are 8 * (r * c + s) + 4 * p + k for cell (r, s),
// partition p (0 = A, 1 = B) and slot k.  A-partition qubits couple to the
// same slot in the vertically adjacent cells, B-partition qubits to the same
// slot in the horizontally adjacent cells.

#include <string>
#include <utility>
#include <vector>

#include "spinbench/ising.hpp"

namespace spinbench::topology {

struct NodeCoord {
    int row = 0;
    int col = 0;
    int partition = -1;  // Chimera / anticluster only
    int slot = -1;       // Chimera / anticluster only
    friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
};

struct TopologyGraph {
    int nodes = 0;
    std::vector<std::pair<int, int>> edges;  // u < v, sorted
    TopologyTag kind;
    std::vector<NodeCoord> coords;

    std::vector<std::vector<int>> adjacency() const;
    std::vector<int> degrees() const;
};

struct ContractionMap {
    std::vector<int> logical_of;            // physical node -> logical node
    std::vector<std::vector<int>> members;  // logical node -> physical nodes

    /// True iff the map is a partition consistent in both directions.
    bool is_partition() const;
};

constexpr int kPartitionA = 0;  // couples vertically
constexpr int kPartitionB = 1;  // couples horizontally

int chimera_index(int c, int row, int col, int partition, int slot);

TopologyGraph build_chimera(int c);
TopologyGraph build_logical_square(int c);
ContractionMap cell_contraction(int c);

/// Physical instance on chimera(c): intra-cell couplers at -1 and each
/// logical coupling split evenly over the four inter-cell couplers.
IsingInstance expand_logical_to_chimera(const IsingInstance& logical);
/// Inverse of expand_logical_to_chimera: sums inter-cell couplers per cell pair.
IsingInstance contract_chimera_to_logical(const IsingInstance& physical);

struct AnticlusterLattice {
    TopologyGraph graph;  // logical graph
    ContractionMap contraction;
    int chimera_size = 0;
};

AnticlusterLattice build_anticluster(int c);

/// Physical instance on chimera(c) for a logical anticluster instance: every
/// contracted pair gets the ferromagnetic `intra_pair` coupler, logical
/// couplings are placed on the unique physical edge joining two logical nodes.
IsingInstance expand_anticluster_to_chimera(const IsingInstance& logical, Decimal intra_pair = {-1, 1});

/// Edge-list export: node count, then one "u v" line per edge.
std::string serialize_topology(const TopologyGraph& graph);

TopologyGraph build(TopologyTag tag);

}  // namespace spinbench::topology
