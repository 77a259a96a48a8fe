#pragma once

// Exact ground states of bias-free planar Ising instances.
//
// Pipeline: embed the nonzero-coupling graph, mark frustrated faces (odd
// number of antiferromagnetic boundary edges), pair the frustrated faces by
// a minimum-weight perfect matching on dual shortest-path distances (|J| per
// crossed edge), flip the satisfaction of every edge crossed an odd number of
// times, and rebuild spins along a BFS tree.  The ground-state energy is
// E0 = -sum_e |J_e| + 2 W with W the matching weight.

#include <cstdint>
#include <utility>
#include <vector>

#include "spinbench/ising.hpp"
#include "spinbench/matching.hpp"
#include "spinbench/planarity.hpp"

namespace spinbench::planar {

struct PrimalEdge {
    int u = 0;
    int v = 0;
    std::int64_t coupling = 0;  // scaled by the instance denominator, nonzero
};

/// Darts: 2e is u -> v and 2e + 1 is v -> u for primal edge e.
struct PlanarEmbedding {
    int vertices = 0;
    std::vector<PrimalEdge> edges;
    RotationSystem rotation;
    std::vector<std::vector<int>> faces;  // dart cycles
    std::vector<int> face_of_dart;
    std::vector<int> component_of_vertex;  // -1 for isolated vertices
    std::vector<int> outer_face;           // one per component
    int components = 0;

    int left_face(int e) const { return face_of_dart[static_cast<std::size_t>(2 * e)]; }
    int right_face(int e) const { return face_of_dart[static_cast<std::size_t>(2 * e + 1)]; }

    /// V - E + F == 2 holds for every component with at least one edge.
    bool euler_ok() const;
};

struct FrustrationReport {
    std::vector<int> frustrated_faces;
    bool parity_ok = false;
};

struct GroundStateOptions {
    /// Each frustrated face starts with edges to this many nearest frustrated
    /// faces; missing pairs are priced against the matching duals and added
    /// until no pair can improve the matching.  0 builds the complete graph.
    int nearest = 10;
};

struct GroundState {
    SpinConfiguration config;
    Decimal energy;
    std::int64_t matching_weight = 0;  // scaled units
    int frustrated_faces = 0;
    int pricing_rounds = 0;
    int matching_edges = 0;
};

struct TimedGroundState {
    GroundState result;
    double median_us = 0;
    std::vector<double> times_us;
};

/// Throws PreconditionError with a Kuratowski witness for nonplanar input.
PlanarEmbedding embed_planar(const IsingInstance& instance);

FrustrationReport frustration(const PlanarEmbedding& embedding, const IsingInstance& instance);

/// Complete graph on the frustrated faces (node k = report.frustrated_faces[k])
/// with all-pairs dual shortest-path weights.
matching::WeightedGraph path_weight_graph(const PlanarEmbedding& embedding, const FrustrationReport& report,
                                          const IsingInstance& instance);

GroundState ground_state(const IsingInstance& instance, const GroundStateOptions& options = {});

TimedGroundState solve_timed(const IsingInstance& instance, int repetitions, const GroundStateOptions& options = {});

}  // namespace spinbench::planar
