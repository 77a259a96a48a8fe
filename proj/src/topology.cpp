#include "spinbench/topology.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace spinbench::topology {

namespace {

void require_size(int c, const char* what) {
    if (c < 1) throw InputError(std::string(what) + ": lattice size must be at least 1");
}

void finish(TopologyGraph& g) {
    for (auto& [u, v] : g.edges) {
        if (u > v) std::swap(u, v);
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
}

std::int64_t reduce_denominator(std::vector<std::int64_t*> values, std::int64_t den) {
    while (den > 1 && std::all_of(values.begin(), values.end(), [](auto* v) { return *v % 10 == 0; })) {
        for (auto* v : values) *v /= 10;
        den /= 10;
    }
    return den;
}

void reduce_instance(IsingInstance& inst) {
    std::vector<std::int64_t*> values;
    for (auto& c : inst.couplings) values.push_back(&c.value);
    for (auto& b : inst.biases) values.push_back(&b.value);
    inst.denominator = reduce_denominator(std::move(values), inst.denominator);
}

}  // namespace

std::vector<std::vector<int>> TopologyGraph::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
    for (const auto& [u, v] : edges) {
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    return adj;
}

std::vector<int> TopologyGraph::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(nodes), 0);
    for (const auto& [u, v] : edges) {
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    return deg;
}

bool ContractionMap::is_partition() const {
    std::vector<int> hits(logical_of.size(), 0);
    for (std::size_t q = 0; q < members.size(); ++q) {
        if (members[q].empty()) return false;
        for (int p : members[q]) {
            if (p < 0 || static_cast<std::size_t>(p) >= logical_of.size()) return false;
            if (logical_of[static_cast<std::size_t>(p)] != static_cast<int>(q)) return false;
            ++hits[static_cast<std::size_t>(p)];
        }
    }
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

int chimera_index(int c, int row, int col, int partition, int slot) {
    return 8 * (row * c + col) + 4 * partition + slot;
}

TopologyGraph build_chimera(int c) {
    require_size(c, "chimera");
    TopologyGraph g;
    g.nodes = 8 * c * c;
    g.kind = {TopologyTag::Kind::chimera, c};
    g.coords.resize(static_cast<std::size_t>(g.nodes));
    for (int r = 0; r < c; ++r) {
        for (int s = 0; s < c; ++s) {
            for (int p = 0; p < 2; ++p) {
                for (int k = 0; k < 4; ++k) {
                    g.coords[static_cast<std::size_t>(chimera_index(c, r, s, p, k))] = {r, s, p, k};
                }
            }
            for (int ka = 0; ka < 4; ++ka) {
                for (int kb = 0; kb < 4; ++kb) {
                    g.edges.emplace_back(chimera_index(c, r, s, kPartitionA, ka), chimera_index(c, r, s, kPartitionB, kb));
                }
            }
            for (int k = 0; k < 4; ++k) {
                if (r + 1 < c) {
                    g.edges.emplace_back(chimera_index(c, r, s, kPartitionA, k), chimera_index(c, r + 1, s, kPartitionA, k));
                }
                if (s + 1 < c) {
                    g.edges.emplace_back(chimera_index(c, r, s, kPartitionB, k), chimera_index(c, r, s + 1, kPartitionB, k));
                }
            }
        }
    }
    finish(g);
    return g;
}

TopologyGraph build_logical_square(int c) {
    require_size(c, "logical_square");
    TopologyGraph g;
    g.nodes = c * c;
    g.kind = {TopologyTag::Kind::logical_square, c};
    g.coords.resize(static_cast<std::size_t>(g.nodes));
    for (int r = 0; r < c; ++r) {
        for (int s = 0; s < c; ++s) {
            const int v = r * c + s;
            g.coords[static_cast<std::size_t>(v)] = {r, s, -1, -1};
            if (s + 1 < c) g.edges.emplace_back(v, v + 1);
            if (r + 1 < c) g.edges.emplace_back(v, v + c);
        }
    }
    finish(g);
    return g;
}

ContractionMap cell_contraction(int c) {
    require_size(c, "cell_contraction");
    ContractionMap m;
    m.logical_of.resize(static_cast<std::size_t>(8 * c * c));
    m.members.resize(static_cast<std::size_t>(c * c));
    for (int p = 0; p < 8 * c * c; ++p) {
        m.logical_of[static_cast<std::size_t>(p)] = p / 8;
        m.members[static_cast<std::size_t>(p / 8)].push_back(p);
    }
    return m;
}

IsingInstance expand_logical_to_chimera(const IsingInstance& logical) {
    if (logical.topology.kind != TopologyTag::Kind::logical_square) {
        throw PreconditionError("expand_logical_to_chimera: instance is not on a logical square lattice");
    }
    const int c = logical.topology.size;
    if (logical.n != c * c) throw InputError("expand_logical_to_chimera: variable count does not match lattice");
    if (logical.has_biases()) throw PreconditionError("expand_logical_to_chimera: biases are not supported");

    IsingInstance phys;
    phys.n = 8 * c * c;
    phys.topology = {TopologyTag::Kind::chimera, c};
    phys.metadata = logical.metadata;
    phys.metadata.params["partition_A"] = "vertical";
    phys.metadata.params["partition_B"] = "horizontal";
    // J/4 needs at most two extra decimal places.
    phys.denominator = logical.denominator * 100;
    const std::int64_t one = phys.denominator;

    for (int r = 0; r < c; ++r) {
        for (int s = 0; s < c; ++s) {
            for (int ka = 0; ka < 4; ++ka) {
                for (int kb = 0; kb < 4; ++kb) {
                    phys.couplings.push_back({chimera_index(c, r, s, kPartitionA, ka),
                                              chimera_index(c, r, s, kPartitionB, kb), -one});
                }
            }
        }
    }
    for (const auto& cp : logical.couplings) {
        if (std::abs(cp.value) > 4 * logical.denominator) {
            throw PreconditionError("expand_logical_to_chimera: |J| > 4 cannot be split within [-1, 1]");
        }
        const int r1 = cp.i / c, s1 = cp.i % c;
        const int r2 = cp.j / c, s2 = cp.j % c;
        int partition = -1;
        if (r1 == r2 && s2 == s1 + 1) partition = kPartitionB;
        else if (s1 == s2 && r2 == r1 + 1) partition = kPartitionA;
        else throw InputError("expand_logical_to_chimera: coupling between non-adjacent cells");
        const std::int64_t share = cp.value * 25;  // value * 100 / 4
        for (int k = 0; k < 4; ++k) {
            phys.couplings.push_back({chimera_index(c, r1, s1, partition, k), chimera_index(c, r2, s2, partition, k), share});
        }
    }
    if (logical.planted) {
        std::vector<std::int8_t> spins(static_cast<std::size_t>(phys.n));
        for (int p = 0; p < phys.n; ++p) spins[static_cast<std::size_t>(p)] = (*logical.planted)[p / 8];
        phys.planted = SpinConfiguration(std::move(spins));
    }
    reduce_instance(phys);
    phys = phys.canonical();
    return phys;
}

IsingInstance contract_chimera_to_logical(const IsingInstance& physical) {
    if (physical.topology.kind != TopologyTag::Kind::chimera) {
        throw PreconditionError("contract_chimera_to_logical: instance is not on a Chimera graph");
    }
    const int c = physical.topology.size;
    if (physical.n != 8 * c * c) throw InputError("contract_chimera_to_logical: variable count does not match lattice");
    IsingInstance logical;
    logical.n = c * c;
    logical.topology = {TopologyTag::Kind::logical_square, c};
    logical.denominator = physical.denominator;
    logical.metadata = physical.metadata;
    logical.metadata.params.erase("partition_A");
    logical.metadata.params.erase("partition_B");
    std::map<std::pair<int, int>, std::int64_t> sums;
    for (const auto& cp : physical.couplings) {
        const int a = cp.i / 8;
        const int b = cp.j / 8;
        if (a == b) continue;
        sums[std::minmax(a, b)] += cp.value;
    }
    for (const auto& [key, v] : sums) logical.couplings.push_back({key.first, key.second, v});
    std::map<int, std::int64_t> bias;
    for (const auto& b : physical.biases) bias[b.i / 8] += b.value;
    for (const auto& [i, v] : bias) logical.biases.push_back({i, v});
    if (physical.planted) {
        std::vector<std::int8_t> spins(static_cast<std::size_t>(logical.n));
        for (int q = 0; q < logical.n; ++q) spins[static_cast<std::size_t>(q)] = (*physical.planted)[8 * q];
        logical.planted = SpinConfiguration(std::move(spins));
    }
    reduce_instance(logical);
    return logical.canonical();
}

AnticlusterLattice build_anticluster(int c) {
    require_size(c, "anticluster");
    AnticlusterLattice out;
    out.chimera_size = c;
    const TopologyGraph chimera = build_chimera(c);
    ContractionMap& m = out.contraction;
    m.logical_of.assign(static_cast<std::size_t>(chimera.nodes), -1);
    auto& coords = out.graph.coords;

    // One chain per (column, slot) through A qubits and per (row, slot)
    // through B qubits; pairs are taken from the low-coordinate end.
    const auto contract_chain = [&](const std::vector<int>& chain) {
        for (std::size_t pos = 0; pos < chain.size(); pos += 2) {
            const int q = static_cast<int>(m.members.size());
            std::vector<int> group{chain[pos]};
            if (pos + 1 < chain.size()) group.push_back(chain[pos + 1]);
            for (int p : group) m.logical_of[static_cast<std::size_t>(p)] = q;
            coords.push_back(chimera.coords[static_cast<std::size_t>(chain[pos])]);
            m.members.push_back(std::move(group));
        }
    };
    for (int s = 0; s < c; ++s) {
        for (int k = 0; k < 4; ++k) {
            std::vector<int> chain;
            for (int r = 0; r < c; ++r) chain.push_back(chimera_index(c, r, s, kPartitionA, k));
            contract_chain(chain);
        }
    }
    for (int r = 0; r < c; ++r) {
        for (int k = 0; k < 4; ++k) {
            std::vector<int> chain;
            for (int s = 0; s < c; ++s) chain.push_back(chimera_index(c, r, s, kPartitionB, k));
            contract_chain(chain);
        }
    }

    out.graph.nodes = static_cast<int>(m.members.size());
    out.graph.kind = {TopologyTag::Kind::anticluster, c};
    for (const auto& [u, v] : chimera.edges) {
        const int a = m.logical_of[static_cast<std::size_t>(u)];
        const int b = m.logical_of[static_cast<std::size_t>(v)];
        if (a != b) out.graph.edges.emplace_back(a, b);
    }
    finish(out.graph);
    return out;
}

IsingInstance expand_anticluster_to_chimera(const IsingInstance& logical, Decimal intra_pair) {
    if (logical.topology.kind != TopologyTag::Kind::anticluster) {
        throw PreconditionError("expand_anticluster_to_chimera: instance is not on an anticluster lattice");
    }
    if (!(intra_pair < Decimal{0, 1}) || intra_pair < Decimal{-1, 1}) {
        throw PreconditionError("expand_anticluster_to_chimera: intra-pair coupling must lie in [-1, 0)");
    }
    const int c = logical.topology.size;
    const AnticlusterLattice lattice = build_anticluster(c);
    if (logical.n != lattice.graph.nodes) throw InputError("expand_anticluster_to_chimera: variable count mismatch");

    IsingInstance phys;
    phys.n = 8 * c * c;
    phys.topology = {TopologyTag::Kind::chimera, c};
    phys.metadata = logical.metadata;
    phys.denominator = std::max(logical.denominator, intra_pair.denominator);

    const TopologyGraph chimera = build_chimera(c);
    std::map<std::pair<int, int>, int> physical_edge;  // logical pair -> chimera edge index
    for (std::size_t e = 0; e < chimera.edges.size(); ++e) {
        const auto [u, v] = chimera.edges[e];
        const int a = lattice.contraction.logical_of[static_cast<std::size_t>(u)];
        const int b = lattice.contraction.logical_of[static_cast<std::size_t>(v)];
        if (a != b) physical_edge.emplace(std::minmax(a, b), static_cast<int>(e));
    }
    for (const auto& group : lattice.contraction.members) {
        if (group.size() == 2) {
            phys.couplings.push_back({std::min(group[0], group[1]), std::max(group[0], group[1]),
                                      rescale(intra_pair.scaled, intra_pair.denominator, phys.denominator)});
        }
    }
    for (const auto& cp : logical.couplings) {
        if (cp.value == 0) continue;
        if (std::abs(cp.value) > logical.denominator) {
            throw PreconditionError("expand_anticluster_to_chimera: logical coupling outside [-1, 1]");
        }
        const auto it = physical_edge.find(std::minmax(cp.i, cp.j));
        if (it == physical_edge.end()) throw InputError("expand_anticluster_to_chimera: coupling not on the lattice");
        const auto [u, v] = chimera.edges[static_cast<std::size_t>(it->second)];
        phys.couplings.push_back({u, v, rescale(cp.value, logical.denominator, phys.denominator)});
    }
    for (const auto& b : logical.biases) {
        const int p = lattice.contraction.members[static_cast<std::size_t>(b.i)].front();
        phys.biases.push_back({p, rescale(b.value, logical.denominator, phys.denominator)});
    }
    if (logical.planted) {
        std::vector<std::int8_t> spins(static_cast<std::size_t>(phys.n));
        for (int p = 0; p < phys.n; ++p) {
            spins[static_cast<std::size_t>(p)] = (*logical.planted)[lattice.contraction.logical_of[static_cast<std::size_t>(p)]];
        }
        phys.planted = SpinConfiguration(std::move(spins));
    }
    reduce_instance(phys);
    return phys.canonical();
}

std::string serialize_topology(const TopologyGraph& graph) {
    std::string out = std::to_string(graph.nodes) + "\n";
    for (const auto& [u, v] : graph.edges) out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

TopologyGraph build(TopologyTag tag) {
    switch (tag.kind) {
        case TopologyTag::Kind::chimera: return build_chimera(tag.size);
        case TopologyTag::Kind::logical_square: return build_logical_square(tag.size);
        case TopologyTag::Kind::anticluster: return build_anticluster(tag.size).graph;
        case TopologyTag::Kind::general: break;
    }
    throw InputError("no builder for a general topology");
}

}  // namespace spinbench::topology
