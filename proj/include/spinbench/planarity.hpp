#pragma once

#include <utility>
#include <vector>

namespace spinbench::planar {

/// Combinatorial embedding: for every vertex, its neighbors in cyclic order.
using RotationSystem = std::vector<std::vector<int>>;

struct PlanarityResult {
    bool planar = false;
    RotationSystem rotation;                           // set when planar
    std::vector<std::pair<int, int>> kuratowski_edges;  // set when nonplanar
};

/// Boyer-Myrvold planarity test on a simple undirected graph.
PlanarityResult test_planarity(int nodes, const std::vector<std::pair<int, int>>& edges);

}  // namespace spinbench::planar
