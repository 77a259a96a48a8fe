#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "spinbench/planarity.hpp"
#include "spinbench/topology.hpp"

using namespace spinbench;
using namespace spinbench::topology;

namespace {

/// Independent edge count: test every node pair against the adjacency rule.
long enumerate_chimera_edges(int c) {
    const TopologyGraph g = build_chimera(c);
    long count = 0;
    for (int u = 0; u < g.nodes; ++u) {
        for (int v = u + 1; v < g.nodes; ++v) {
            const NodeCoord& a = g.coords[static_cast<std::size_t>(u)];
            const NodeCoord& b = g.coords[static_cast<std::size_t>(v)];
            const bool same_cell = a.row == b.row && a.col == b.col;
            if (same_cell && a.partition != b.partition) ++count;
            if (a.partition == b.partition && a.slot == b.slot) {
                if (a.partition == kPartitionA && a.col == b.col && std::abs(a.row - b.row) == 1) ++count;
                if (a.partition == kPartitionB && a.row == b.row && std::abs(a.col - b.col) == 1) ++count;
            }
        }
    }
    return count;
}

bool is_bipartite(const TopologyGraph& g) {
    const auto adj = g.adjacency();
    std::vector<int> color(static_cast<std::size_t>(g.nodes), -1);
    for (int s = 0; s < g.nodes; ++s) {
        if (color[static_cast<std::size_t>(s)] >= 0) continue;
        color[static_cast<std::size_t>(s)] = 0;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (color[static_cast<std::size_t>(w)] < 0) {
                    color[static_cast<std::size_t>(w)] = 1 - color[static_cast<std::size_t>(v)];
                    stack.push_back(w);
                } else if (color[static_cast<std::size_t>(w)] == color[static_cast<std::size_t>(v)]) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("chimera examples") {
    const TopologyGraph one = build_chimera(1);
    CHECK(one.nodes == 8);
    CHECK(one.edges.size() == 16);

    const TopologyGraph big = build_chimera(16);
    CHECK(big.nodes == 2048);
    CHECK(big.edges.size() == 6016);
    CHECK(enumerate_chimera_edges(16) == 6016);

    CHECK_THROWS_AS(build_chimera(0), InputError);
}

TEST_CASE("chimera counts and edge structure for c in 1..32") {
    for (int c = 1; c <= 32; ++c) {
        const TopologyGraph g = build_chimera(c);
        CHECK(g.nodes == 8 * c * c);
        CHECK(static_cast<long>(g.edges.size()) == 16L * c * c + 8L * c * (c - 1));
        for (int d : g.degrees()) CHECK(d <= 6);
        for (const auto& [u, v] : g.edges) {
            const NodeCoord& a = g.coords[static_cast<std::size_t>(u)];
            const NodeCoord& b = g.coords[static_cast<std::size_t>(v)];
            if (a.row == b.row && a.col == b.col) {
                CHECK(a.partition != b.partition);
            } else {
                CHECK(a.partition == b.partition);
                CHECK(a.slot == b.slot);
                CHECK(std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1);
            }
        }
    }
    for (int c = 1; c <= 6; ++c) CHECK(enumerate_chimera_edges(c) == static_cast<long>(build_chimera(c).edges.size()));
}

TEST_CASE("chimera node ids") {
    CHECK(chimera_index(4, 0, 0, 0, 0) == 0);
    CHECK(chimera_index(4, 1, 2, 1, 3) == 8 * 6 + 4 + 3);
}

TEST_CASE("logical square lattice") {
    CHECK(build_logical_square(2).nodes == 4);
    CHECK(build_logical_square(2).edges.size() == 4);
    CHECK(build_logical_square(16).nodes == 256);
    CHECK(build_logical_square(16).edges.size() == 480);
    CHECK(build_logical_square(1).nodes == 1);
    CHECK(build_logical_square(1).edges.empty());
    CHECK_THROWS_AS(build_logical_square(0), InputError);
    for (int c = 1; c <= 12; ++c) {
        const TopologyGraph g = build_logical_square(c);
        CHECK(static_cast<int>(g.edges.size()) == 2 * c * (c - 1));
        CHECK(is_bipartite(g));
        CHECK(planar::test_planarity(g.nodes, g.edges).planar);
    }
}

TEST_CASE("cell contraction is a partition") {
    const ContractionMap one = cell_contraction(1);
    CHECK(one.members.size() == 1);
    for (int p = 0; p < 8; ++p) CHECK(one.logical_of[static_cast<std::size_t>(p)] == 0);
    const ContractionMap two = cell_contraction(2);
    CHECK(two.members.size() == 4);
    for (const auto& m : two.members) CHECK(m.size() == 8);
    for (int c = 1; c <= 8; ++c) {
        const ContractionMap m = cell_contraction(c);
        CHECK(m.is_partition());
        for (std::size_t q = 0; q < m.members.size(); ++q) {
            for (int p : m.members[q]) CHECK(m.logical_of[static_cast<std::size_t>(p)] == static_cast<int>(q));
        }
    }
}

TEST_CASE("expand logical to chimera") {
    IsingInstance logical;
    logical.n = 4;
    logical.topology = {TopologyTag::Kind::logical_square, 2};
    logical.couplings = {{0, 1, -4}, {0, 2, 0}, {1, 3, 3}, {2, 3, -1}};
    const IsingInstance phys = expand_logical_to_chimera(logical);
    CHECK(phys.n == 32);
    CHECK(phys.topology == TopologyTag{TopologyTag::Kind::chimera, 2});
    std::map<std::pair<int, int>, Decimal> value;
    for (const auto& c : phys.couplings) value[{c.i, c.j}] = phys.value(c.value);
    // J = -4 between horizontally adjacent cells: four B couplers at -1.
    for (int k = 0; k < 4; ++k) {
        CHECK(value.at({chimera_index(2, 0, 0, kPartitionB, k), chimera_index(2, 0, 1, kPartitionB, k)}) == Decimal{-1, 1});
        CHECK(value.count({chimera_index(2, 0, 0, kPartitionA, k), chimera_index(2, 1, 0, kPartitionA, k)}) == 0);
        CHECK(value.at({chimera_index(2, 0, 1, kPartitionA, k), chimera_index(2, 1, 1, kPartitionA, k)}) == Decimal{75, 100});
    }
    int intra = 0;
    for (const auto& c : phys.couplings) {
        if (c.i / 8 == c.j / 8) {
            ++intra;
            CHECK(phys.value(c.value) == Decimal{-1, 1});
        }
        CHECK_FALSE(Decimal{1, 1} < phys.value(c.value));
        CHECK_FALSE(phys.value(c.value) < Decimal{-1, 1});
    }
    CHECK(intra == 4 * 16);

    IsingInstance too_strong = logical;
    too_strong.couplings[0].value = -5;
    CHECK_THROWS_AS(expand_logical_to_chimera(too_strong), PreconditionError);
    IsingInstance biased = logical;
    biased.biases = {{0, 1}};
    CHECK_THROWS_AS(expand_logical_to_chimera(biased), PreconditionError);
}

TEST_CASE("contract(expand(x)) == x for random logical instances") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int c = 1 + static_cast<int>(rng() % 6);
        const TopologyGraph g = build_logical_square(c);
        IsingInstance x;
        x.n = g.nodes;
        x.topology = g.kind;
        for (const auto& [u, v] : g.edges) x.couplings.push_back({u, v, static_cast<std::int64_t>(rng() % 9) - 4});
        const IsingInstance phys = expand_logical_to_chimera(x);
        // Direct summation of inter-cell couplers per cell pair.
        std::map<std::pair<int, int>, std::int64_t> sums;
        for (const auto& cp : phys.couplings) {
            if (cp.i / 8 != cp.j / 8) sums[{cp.i / 8, cp.j / 8}] += cp.value;
        }
        for (const auto& cp : x.canonical().couplings) {
            CHECK(Decimal{sums[{cp.i, cp.j}], phys.denominator} == Decimal{cp.value, 1});
        }
        const IsingInstance back = contract_chimera_to_logical(phys);
        CHECK(back.same_terms(x));
        CHECK(back.topology == x.topology);
    }
}

TEST_CASE("anticluster node counts") {
    CHECK(build_anticluster(3).graph.nodes == 48);
    CHECK(build_anticluster(5).graph.nodes == 120);
    for (int c = 1; c <= 15; c += 2) CHECK(build_anticluster(c).graph.nodes == 4 * c * (c + 1));
    // Even sizes pair every chain completely.
    for (int c = 2; c <= 10; c += 2) CHECK(build_anticluster(c).graph.nodes == 4 * c * c);
    CHECK_THROWS_AS(build_anticluster(0), InputError);
}

TEST_CASE("anticluster degree structure") {
    for (int c = 3; c <= 9; c += 2) {
        const AnticlusterLattice lattice = build_anticluster(c);
        CHECK(lattice.contraction.is_partition());
        const auto deg = lattice.graph.degrees();
        std::set<int> histogram;
        for (int q = 0; q < lattice.graph.nodes; ++q) {
            const auto& group = lattice.contraction.members[static_cast<std::size_t>(q)];
            const int d = deg[static_cast<std::size_t>(q)];
            histogram.insert(d);
            if (group.size() == 1) {
                CHECK(d == 5);  // chain end: four intra-cell neighbors plus one chain neighbor
                continue;
            }
            // A pair has four intra-cell neighbors at each endpoint plus one
            // chain neighbor per endpoint that is not at the end of its chain.
            const NodeCoord& first = lattice.graph.coords[static_cast<std::size_t>(q)];
            const int pos = first.partition == kPartitionA ? first.row : first.col;
            const int outward = (pos > 0 ? 1 : 0) + (pos + 2 < c ? 1 : 0);
            CHECK(d == 8 + outward);
        }
        if (c == 3) CHECK(histogram == std::set<int>{5, 9});
        else CHECK(histogram == std::set<int>{5, 9, 10});
    }
}

TEST_CASE("anticluster lattices are nonplanar") {
    for (int c = 1; c <= 6; ++c) {
        const TopologyGraph g = build_anticluster(c).graph;
        const auto result = planar::test_planarity(g.nodes, g.edges);
        CHECK_FALSE(result.planar);
        CHECK_FALSE(result.kuratowski_edges.empty());
    }
}

TEST_CASE("expand anticluster to chimera") {
    const AnticlusterLattice lattice = build_anticluster(3);
    IsingInstance zero;
    zero.n = lattice.graph.nodes;
    zero.topology = lattice.graph.kind;
    const IsingInstance phys = expand_anticluster_to_chimera(zero);
    int pairs = 0;
    for (const auto& g : lattice.contraction.members) pairs += g.size() == 2;
    CHECK(static_cast<int>(phys.couplings.size()) == pairs);
    for (const auto& c : phys.couplings) {
        CHECK(c.value == -phys.denominator);
        CHECK(lattice.contraction.logical_of[static_cast<std::size_t>(c.i)] ==
              lattice.contraction.logical_of[static_cast<std::size_t>(c.j)]);
    }

    IsingInstance x = zero;
    for (const auto& [u, v] : lattice.graph.edges) x.couplings.push_back({u, v, (u + v) % 2 ? 1 : -1});
    const IsingInstance weak = expand_anticluster_to_chimera(x, Decimal{-5, 10});
    CHECK(weak.denominator == 10);
    CHECK(static_cast<int>(weak.couplings.size()) == pairs + static_cast<int>(lattice.graph.edges.size()));
    // Energy of a uniform state is preserved up to the intra-pair term.
    const std::int64_t logical_e = energy_scaled(x, SpinConfiguration::uniform(x.n).spins());
    const std::int64_t phys_e = energy_scaled(weak, SpinConfiguration::uniform(weak.n).spins());
    CHECK(phys_e == 10 * logical_e - 5 * pairs);

    CHECK_THROWS_AS(expand_anticluster_to_chimera(zero, Decimal{-2, 1}), PreconditionError);
    CHECK_THROWS_AS(expand_anticluster_to_chimera(zero, Decimal{0, 1}), PreconditionError);
    IsingInstance strong = x;
    strong.couplings[0].value = 2;
    CHECK_THROWS_AS(expand_anticluster_to_chimera(strong), PreconditionError);
}

TEST_CASE("topology export") {
    CHECK(serialize_topology(build_logical_square(2)) == "4\n0 1\n0 2\n1 3\n2 3\n");
}
