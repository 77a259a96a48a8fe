#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "spinbench/fcl.hpp"
#include "spinbench/planar.hpp"

using namespace spinbench;
using namespace spinbench::fcl;

namespace {

std::int64_t sum_of_couplings(const IsingInstance& inst) {
    std::int64_t s = 0;
    for (const auto& c : inst.couplings) s += c.value;
    return s;
}

std::int64_t max_abs(const IsingInstance& inst) {
    std::int64_t m = 0;
    for (const auto& c : inst.couplings) m = std::max(m, std::abs(c.value));
    return m;
}

}  // namespace

TEST_CASE("params validation") {
    FclParams p;
    CHECK_NOTHROW(p.validate());
    p.alpha = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.rho = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    p.rho = 4;
    p.ruggedness = 3;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = {};
    CHECK(p.loop_count(256) == 256);
    p.alpha = 0.25;
    CHECK(p.loop_count(4) == 1);
}

TEST_CASE("loops on the 2x2 lattice are the unique square") {
    const auto g = topology::build_logical_square(2);
    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        const Loop loop = sample_loop(g, rng);
        REQUIRE(loop.edges.size() == 4);
        std::set<std::pair<int, int>> edges(loop.edges.begin(), loop.edges.end());
        CHECK(edges == std::set<std::pair<int, int>>(g.edges.begin(), g.edges.end()));
        CHECK(loop.antiferromagnetic_edge >= 0);
        CHECK(loop.antiferromagnetic_edge < 4);
    }
}

TEST_CASE("sampled loops are simple cycles of length at least 4") {
    const auto g = topology::build_logical_square(8);
    const std::set<std::pair<int, int>> graph_edges(g.edges.begin(), g.edges.end());
    Rng rng(2);
    for (int k = 0; k < 2000; ++k) {
        const Loop loop = sample_loop(g, rng);
        CHECK(loop.nodes.size() >= 4);
        CHECK(loop.nodes.size() == loop.edges.size());
        CHECK(std::set<int>(loop.nodes.begin(), loop.nodes.end()).size() == loop.nodes.size());
        for (const auto& e : loop.edges) CHECK(graph_edges.count(e) == 1);
    }
}

TEST_CASE("designated edge is uniform over the 2x2 square") {
    const auto g = topology::build_logical_square(2);
    Rng rng(3);
    const int samples = 10000;
    std::map<std::pair<int, int>, int> counts;
    for (int k = 0; k < samples; ++k) {
        const Loop loop = sample_loop(g, rng);
        ++counts[loop.edges[static_cast<std::size_t>(loop.antiferromagnetic_edge)]];
    }
    REQUIRE(counts.size() == 4);
    const double expected = samples / 4.0;
    const double sigma = std::sqrt(samples * 0.25 * 0.75);
    for (const auto& [edge, n] : counts) CHECK(std::abs(n - expected) <= 3 * sigma);
}

TEST_CASE("single loop on the 2x2 lattice") {
    FclParams p;
    p.alpha = 0.25;
    p.seed = 9;
    const IsingInstance inst = generate_fcl(topology::build_logical_square(2), p);
    REQUIRE(inst.couplings.size() == 4);
    int ferro = 0, anti = 0;
    for (const auto& c : inst.couplings) {
        ferro += c.value == -1;
        anti += c.value == 1;
    }
    CHECK(ferro == 3);
    CHECK(anti == 1);
    CHECK(planted_energy(inst) == Decimal{-2, 1});
    CHECK(inst.topology.to_string() == "logical_square(2)");
    CHECK(validate_instance(inst).empty());
}

TEST_CASE("planted energy examples") {
    IsingInstance two;
    two.n = 8;
    for (int base : {0, 4}) {
        two.couplings.push_back({base, base + 1, -1});
        two.couplings.push_back({base + 1, base + 3, -1});
        two.couplings.push_back({base + 2, base + 3, -1});
        two.couplings.push_back({base, base + 2, 1});
    }
    two.planted = SpinConfiguration::uniform(8);
    CHECK(planted_energy(two) == Decimal{-4, 1});
    two.planted.reset();
    CHECK_THROWS_AS(planted_energy(two), InputError);
}

TEST_CASE("planted ground state confirmed by brute force on 4x4") {
    const auto g = topology::build_logical_square(4);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        FclParams p;
        p.alpha = 1;
        p.rho = 3;
        p.seed = seed;
        const IsingInstance inst = generate_fcl(g, p);
        CHECK(planted_energy(inst) == Decimal{sum_of_couplings(inst), 1});
        CHECK(oracle::brute_force_min_energy(inst) == sum_of_couplings(inst));
        CHECK(max_abs(inst) <= 3);
        CHECK(coupling_graph_connected(inst));
        CHECK(inst.biases.empty());
    }
}

TEST_CASE("generated instances obey precision and connectivity across parameters") {
    const auto g = topology::build_logical_square(8);
    const std::pair<double, int> feasible[] = {{0.25, 3}, {0.5, 1}, {0.5, 2}, {1.0, 2}, {1.0, 3}, {1.0, 5}, {2.0, 5}, {2.0, 7}};
    for (const auto& [alpha, rho] : feasible) {
        {
            FclParams p;
            p.alpha = alpha;
            p.rho = rho;
            p.ruggedness = 7;
            p.seed = static_cast<std::uint64_t>(rho * 100 + alpha * 8);
            const IsingInstance inst = generate_fcl(g, p);
            CHECK(max_abs(inst) <= rho);
            CHECK(coupling_graph_connected(inst));
            CHECK(validate_instance(inst).empty());
            CHECK(inst.metadata.generator == "fcl");
            CHECK(inst.metadata.params.at("rho") == std::to_string(rho));
        }
    }
}

TEST_CASE("generation is deterministic") {
    const auto g = topology::build_logical_square(10);
    FclParams p;
    p.alpha = 1.5;
    p.rho = 4;
    p.ruggedness = 4;
    p.seed = 77;
    const IsingInstance a = generate_fcl(g, p);
    const IsingInstance b = generate_fcl(g, p);
    CHECK(serialize_instance(a) == serialize_instance(b));
    p.seed = 78;
    CHECK(serialize_instance(generate_fcl(g, p)) != serialize_instance(a));
}

TEST_CASE("exhausted budgets are reported") {
    // A tree has no cycles.
    topology::TopologyGraph path;
    path.nodes = 4;
    path.edges = {{0, 1}, {1, 2}, {2, 3}};
    Rng rng(5);
    CHECK_THROWS_AS(sample_loop(path, rng, 50), BudgetExhausted);

    FclParams p;
    p.alpha = 50;
    p.rho = 1;
    p.max_loop_rejections = 10;
    p.max_instance_rejections = 5;
    CHECK_THROWS_AS(generate_fcl(topology::build_logical_square(2), p), BudgetExhausted);

    // Too many loops for the coupling capacity 3 * |E|: mean loop length is
    // well above 4, so the lattice saturates before 2n loops fit.
    p = {};
    p.alpha = 2;
    p.rho = 3;
    p.max_loop_rejections = 2000;
    p.max_instance_rejections = 3;
    CHECK_THROWS_AS(generate_fcl(topology::build_logical_square(16), p), BudgetExhausted);
}

TEST_CASE("exact solver recovers the planted energy on 16x16") {
    const auto g = topology::build_logical_square(16);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        FclParams p;
        p.alpha = seed % 3 == 0 ? 0.5 : seed % 3 == 1 ? 1.0 : 2.0;
        p.rho = 3 + 2 * static_cast<int>(seed % 3);
        p.ruggedness = 7;
        p.seed = seed;
        const IsingInstance inst = generate_fcl(g, p);
        CHECK(planar::ground_state(inst).energy == planted_energy(inst));
    }
}
