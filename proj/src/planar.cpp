#include "spinbench/planar.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <tuple>
#include <stdexcept>
#include <unordered_map>

namespace spinbench::planar {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

std::int64_t edge_key(int u, int v) {
    return (static_cast<std::int64_t>(std::min(u, v)) << 32) | static_cast<std::uint32_t>(std::max(u, v));
}

RotationSystem grid_rotation(int c, const std::vector<PrimalEdge>& edges, int n) {
    std::vector<std::set<int>> present(static_cast<std::size_t>(n));
    for (const auto& e : edges) {
        present[static_cast<std::size_t>(e.u)].insert(e.v);
        present[static_cast<std::size_t>(e.v)].insert(e.u);
    }
    RotationSystem rot(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        const int r = v / c;
        const int s = v % c;
        // Counter-clockwise with rows growing downward: right, up, left, down.
        const int candidates[4] = {s + 1 < c ? v + 1 : -1, r > 0 ? v - c : -1, s > 0 ? v - 1 : -1,
                                   r + 1 < c ? v + c : -1};
        for (int w : candidates) {
            if (w >= 0 && present[static_cast<std::size_t>(v)].count(w)) rot[static_cast<std::size_t>(v)].push_back(w);
        }
        if (rot[static_cast<std::size_t>(v)].size() != present[static_cast<std::size_t>(v)].size()) {
            throw InputError("coupling outside the logical square lattice");
        }
    }
    return rot;
}

/// Dual graph in CSR form: for face f, entries [offset[f], offset[f+1]).
struct DualGraph {
    std::vector<int> offset;
    std::vector<int> target;
    std::vector<std::int64_t> weight;
    std::vector<int> dart;

    int faces() const { return static_cast<int>(offset.size()) - 1; }
};

DualGraph build_dual(const PlanarEmbedding& emb) {
    DualGraph g;
    const int F = static_cast<int>(emb.faces.size());
    g.offset.assign(static_cast<std::size_t>(F) + 1, 0);
    for (int f = 0; f < F; ++f) {
        for (int d : emb.faces[static_cast<std::size_t>(f)]) {
            const int other = emb.face_of_dart[static_cast<std::size_t>(d ^ 1)];
            if (other == f) continue;
            g.target.push_back(other);
            g.weight.push_back(std::abs(emb.edges[static_cast<std::size_t>(d >> 1)].coupling));
            g.dart.push_back(d);
        }
        g.offset[static_cast<std::size_t>(f) + 1] = static_cast<int>(g.target.size());
    }
    return g;
}

/// Dijkstra on the dual graph with reusable buffers.
class DualSearch {
public:
    explicit DualSearch(const DualGraph& g)
        : g_(g), dist_(static_cast<std::size_t>(g.faces()), kInf), pred_(static_cast<std::size_t>(g.faces()), -1) {}

    /// `settle(face, dist)` returns false to stop the search.  Faces at
    /// distance >= limit are not settled.
    template <class Settle>
    void run(int source, std::int64_t limit, Settle&& settle) {
        for (int f : touched_) {
            dist_[static_cast<std::size_t>(f)] = kInf;
            pred_[static_cast<std::size_t>(f)] = -1;
        }
        touched_.clear();
        using Item = std::pair<std::int64_t, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist_[static_cast<std::size_t>(source)] = 0;
        touched_.push_back(source);
        heap.emplace(0, source);
        while (!heap.empty()) {
            const auto [d, f] = heap.top();
            heap.pop();
            if (d != dist_[static_cast<std::size_t>(f)]) continue;
            if (d >= limit) break;
            if (!settle(f, d)) break;
            for (int k = g_.offset[static_cast<std::size_t>(f)]; k < g_.offset[static_cast<std::size_t>(f) + 1]; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                const int t = g_.target[ku];
                const std::int64_t nd = d + g_.weight[ku];
                auto& cur = dist_[static_cast<std::size_t>(t)];
                if (nd < cur) {
                    if (cur == kInf) touched_.push_back(t);
                    cur = nd;
                    pred_[static_cast<std::size_t>(t)] = k;
                    heap.emplace(nd, t);
                }
            }
        }
    }

    /// CSR entry used to reach `face` on the last search, -1 at the source.
    int pred(int face) const { return pred_[static_cast<std::size_t>(face)]; }

private:
    const DualGraph& g_;
    std::vector<std::int64_t> dist_;
    std::vector<int> pred_;
    std::vector<int> touched_;
};

}  // namespace

bool PlanarEmbedding::euler_ok() const {
    std::vector<long> v(static_cast<std::size_t>(components), 0);
    std::vector<long> e(static_cast<std::size_t>(components), 0);
    std::vector<long> f(static_cast<std::size_t>(components), 0);
    for (int x = 0; x < vertices; ++x) {
        const int comp = component_of_vertex[static_cast<std::size_t>(x)];
        if (comp >= 0) ++v[static_cast<std::size_t>(comp)];
    }
    for (const auto& edge : edges) ++e[static_cast<std::size_t>(component_of_vertex[static_cast<std::size_t>(edge.u)])];
    for (const auto& face : faces) {
        const int tail = edges[static_cast<std::size_t>(face.front() >> 1)].u;
        ++f[static_cast<std::size_t>(component_of_vertex[static_cast<std::size_t>(tail)])];
    }
    for (int k = 0; k < components; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (v[ku] - e[ku] + f[ku] != 2) return false;
    }
    return true;
}

PlanarEmbedding embed_planar(const IsingInstance& instance) {
    PlanarEmbedding emb;
    emb.vertices = instance.n;
    for (const auto& c : instance.canonical().couplings) emb.edges.push_back({c.i, c.j, c.value});

    const bool lattice = instance.topology.kind == TopologyTag::Kind::logical_square &&
                         instance.n == instance.topology.size * instance.topology.size;
    const bool has_coords = lattice;
    if (lattice) {
        emb.rotation = grid_rotation(instance.topology.size, emb.edges, instance.n);
    } else {
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(emb.edges.size());
        for (const auto& e : emb.edges) pairs.emplace_back(e.u, e.v);
        PlanarityResult test = test_planarity(instance.n, pairs);
        if (!test.planar) {
            std::string witness;
            for (std::size_t k = 0; k < test.kuratowski_edges.size() && k < 12; ++k) {
                witness += " (" + std::to_string(test.kuratowski_edges[k].first) + "," +
                           std::to_string(test.kuratowski_edges[k].second) + ")";
            }
            if (test.kuratowski_edges.size() > 12) witness += " ...";
            throw PreconditionError("nonplanar topology: Kuratowski subgraph with " +
                                    std::to_string(test.kuratowski_edges.size()) + " edges:" + witness);
        }
        emb.rotation = std::move(test.rotation);
    }

    // Darts leaving each vertex in rotation order.
    std::unordered_map<std::int64_t, int> edge_of;
    edge_of.reserve(emb.edges.size() * 2);
    for (std::size_t e = 0; e < emb.edges.size(); ++e) edge_of[edge_key(emb.edges[e].u, emb.edges[e].v)] = static_cast<int>(e);
    const std::size_t D = emb.edges.size() * 2;
    std::vector<std::vector<int>> out(static_cast<std::size_t>(emb.vertices));
    std::vector<int> position(D, -1);
    for (int v = 0; v < emb.vertices; ++v) {
        for (int w : emb.rotation[static_cast<std::size_t>(v)]) {
            const int e = edge_of.at(edge_key(v, w));
            const int d = emb.edges[static_cast<std::size_t>(e)].u == v ? 2 * e : 2 * e + 1;
            position[static_cast<std::size_t>(d)] = static_cast<int>(out[static_cast<std::size_t>(v)].size());
            out[static_cast<std::size_t>(v)].push_back(d);
        }
    }
    const auto head = [&](int d) {
        const auto& e = emb.edges[static_cast<std::size_t>(d >> 1)];
        return (d & 1) ? e.u : e.v;
    };
    const auto next_dart = [&](int d) {
        const int h = head(d);
        const auto& ring = out[static_cast<std::size_t>(h)];
        const int p = position[static_cast<std::size_t>(d ^ 1)];
        return ring[static_cast<std::size_t>((p + 1) % static_cast<int>(ring.size()))];
    };

    emb.face_of_dart.assign(D, -1);
    for (std::size_t start = 0; start < D; ++start) {
        if (emb.face_of_dart[start] != -1) continue;
        const int f = static_cast<int>(emb.faces.size());
        std::vector<int> cycle;
        int d = static_cast<int>(start);
        do {
            emb.face_of_dart[static_cast<std::size_t>(d)] = f;
            cycle.push_back(d);
            d = next_dart(d);
        } while (d != static_cast<int>(start));
        emb.faces.push_back(std::move(cycle));
    }

    emb.component_of_vertex.assign(static_cast<std::size_t>(emb.vertices), -1);
    for (int s = 0; s < emb.vertices; ++s) {
        if (emb.component_of_vertex[static_cast<std::size_t>(s)] != -1 || out[static_cast<std::size_t>(s)].empty()) continue;
        const int comp = emb.components++;
        std::vector<int> stack{s};
        emb.component_of_vertex[static_cast<std::size_t>(s)] = comp;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : emb.rotation[static_cast<std::size_t>(v)]) {
                if (emb.component_of_vertex[static_cast<std::size_t>(w)] == -1) {
                    emb.component_of_vertex[static_cast<std::size_t>(w)] = comp;
                    stack.push_back(w);
                }
            }
        }
    }

    // Outer face per component: positive signed area when coordinates are
    // known, otherwise the longest boundary.
    emb.outer_face.assign(static_cast<std::size_t>(emb.components), -1);
    std::vector<double> best(static_cast<std::size_t>(emb.components), std::numeric_limits<double>::infinity());
    for (std::size_t f = 0; f < emb.faces.size(); ++f) {
        const auto& cycle = emb.faces[f];
        const int tail = emb.edges[static_cast<std::size_t>(cycle.front() >> 1)].u;
        const auto comp = static_cast<std::size_t>(emb.component_of_vertex[static_cast<std::size_t>(tail)]);
        double score = -static_cast<double>(cycle.size());
        if (has_coords) {
            const int c = instance.topology.size;
            double area = 0;
            for (int d : cycle) {
                const int a = head(d ^ 1);
                const int b = head(d);
                const double xa = a % c, ya = -(a / c), xb = b % c, yb = -(b / c);
                area += xa * yb - xb * ya;
            }
            score = -area;  // bounded faces are traced clockwise
        }
        if (score < best[comp]) {
            best[comp] = score;
            emb.outer_face[comp] = static_cast<int>(f);
        }
    }
    return emb;
}

FrustrationReport frustration(const PlanarEmbedding& embedding, const IsingInstance& instance) {
    (void)instance;  // couplings are carried by the embedding
    FrustrationReport report;
    for (std::size_t f = 0; f < embedding.faces.size(); ++f) {
        int positive = 0;
        for (int d : embedding.faces[f]) {
            if (embedding.edges[static_cast<std::size_t>(d >> 1)].coupling > 0) ++positive;
        }
        if (positive % 2 == 1) report.frustrated_faces.push_back(static_cast<int>(f));
    }
    // Every antiferromagnetic edge is counted on both of its sides, so each
    // component has an even number of frustrated faces.
    std::vector<int> per_component(static_cast<std::size_t>(embedding.components), 0);
    for (int f : report.frustrated_faces) {
        const int tail = embedding.edges[static_cast<std::size_t>(embedding.faces[static_cast<std::size_t>(f)].front() >> 1)].u;
        ++per_component[static_cast<std::size_t>(embedding.component_of_vertex[static_cast<std::size_t>(tail)])];
    }
    report.parity_ok = std::all_of(per_component.begin(), per_component.end(), [](int k) { return k % 2 == 0; });
    return report;
}

matching::WeightedGraph path_weight_graph(const PlanarEmbedding& embedding, const FrustrationReport& report,
                                          const IsingInstance& instance) {
    (void)instance;
    const DualGraph dual = build_dual(embedding);
    std::vector<int> terminal_of(embedding.faces.size(), -1);
    for (std::size_t k = 0; k < report.frustrated_faces.size(); ++k) {
        terminal_of[static_cast<std::size_t>(report.frustrated_faces[k])] = static_cast<int>(k);
    }
    matching::WeightedGraph g;
    g.nodes = static_cast<int>(report.frustrated_faces.size());
    DualSearch search(dual);
    for (int a = 0; a < g.nodes; ++a) {
        search.run(report.frustrated_faces[static_cast<std::size_t>(a)], kInf, [&](int face, std::int64_t d) {
            const int b = terminal_of[static_cast<std::size_t>(face)];
            if (b > a) g.add_edge(a, b, d);
            return true;
        });
    }
    return g;
}

constexpr int kPricingPerVertex = 4;
constexpr int kPricingLocalFaces = 256;

GroundState ground_state(const IsingInstance& instance, const GroundStateOptions& options) {
    if (instance.has_biases()) {
        throw PreconditionError("exact planar solver requires an instance without biases");
    }
    const PlanarEmbedding emb = embed_planar(instance);
    const FrustrationReport report = frustration(emb, instance);
    if (!report.parity_ok) throw std::logic_error("frustrated-face parity violated");

    const DualGraph dual = build_dual(emb);
    const auto& terminals = report.frustrated_faces;
    const int T = static_cast<int>(terminals.size());
    std::vector<int> terminal_of(emb.faces.size(), -1);
    for (int k = 0; k < T; ++k) terminal_of[static_cast<std::size_t>(terminals[static_cast<std::size_t>(k)])] = k;

    GroundState out;
    out.frustrated_faces = T;
    DualSearch search(dual);

    std::vector<char> unsatisfied(emb.edges.size(), 0);
    if (T > 0) {
        std::set<std::pair<int, int>> present;
        matching::WeightedGraph g;
        g.nodes = T;
        const auto add = [&](int a, int b, std::int64_t d) {
            if (present.insert(std::minmax(a, b)).second) g.add_edge(std::min(a, b), std::max(a, b), d);
        };
        const int initial = options.nearest <= 0 || options.nearest >= T - 1 ? T : options.nearest;
        std::vector<int> nearest(static_cast<std::size_t>(T), initial);
        const auto connect_nearest = [&](int a) {
            int found = 0;
            const int k = nearest[static_cast<std::size_t>(a)];
            search.run(terminals[static_cast<std::size_t>(a)], kInf, [&](int face, std::int64_t d) {
                const int b = terminal_of[static_cast<std::size_t>(face)];
                if (b >= 0 && b != a) {
                    add(a, b, d);
                    if (++found >= k) return false;
                }
                return true;
            });
        };
        for (int a = 0; a < T; ++a) connect_nearest(a);

        std::vector<int> mates;
        for (;;) {
            ++out.pricing_rounds;
            matching::PerfectMatcher matcher(g);
            if (!matcher.solve()) {
                // Widen the neighbourhoods of the vertices left exposed.
                const auto exposed = matcher.mates();
                bool widened = false;
                for (int a = 0; a < T; ++a) {
                    if (exposed[static_cast<std::size_t>(a)] >= 0 || nearest[static_cast<std::size_t>(a)] >= T) continue;
                    nearest[static_cast<std::size_t>(a)] = std::min(T, 2 * nearest[static_cast<std::size_t>(a)]);
                    connect_nearest(a);
                    widened = true;
                }
                if (!widened) throw std::logic_error("dual graph admits no perfect matching of frustrated faces");
                continue;
            }
            // Price absent pairs against the duals.  A cheap pass first looks
            // only at the faces nearest each vertex; when it finds nothing, the
            // exact pass searches every face that could hold a violated pair,
            // so the loop only ends on an optimality certificate.  Only the
            // nearest few violated pairs per vertex are added: adding every
            // violated pair at once bloats the graph with edges the optimum
            // never uses.
            std::vector<std::tuple<std::int64_t, int, std::int64_t>> violated;
            const auto price = [&](bool local) {
                int added = 0;
                for (int a = 0; a < T; ++a) {
                    violated.clear();
                    int settled = 0;
                    search.run(terminals[static_cast<std::size_t>(a)], matcher.pricing_limit(a),
                               [&](int face, std::int64_t d) {
                                   const int b = terminal_of[static_cast<std::size_t>(face)];
                                   if (b >= 0 && b != a && !present.count(std::minmax(a, b))) {
                                       const std::int64_t rc = matcher.reduced_cost2(a, b, d);
                                       if (rc < 0) violated.emplace_back(rc, b, d);
                                   }
                                   if (local && ++settled >= kPricingLocalFaces) return false;
                                   return violated.size() < static_cast<std::size_t>(kPricingPerVertex);
                               });
                    for (const auto& [rc, b, d] : violated) {
                        add(a, b, d);
                        ++added;
                    }
                }
                return added;
            };
            int added = price(true);
            if (added == 0) added = price(false);
            if (added == 0) {
                const matching::Matching m = matcher.matching();
                out.matching_weight = m.total_weight;
                mates = matcher.mates();
                break;
            }
        }
        out.matching_edges = static_cast<int>(g.edges.size());

        // Edges crossed an odd number of times by the matched dual paths.
        for (int a = 0; a < T; ++a) {
            const int b = mates[static_cast<std::size_t>(a)];
            if (b < a) continue;
            const int target = terminals[static_cast<std::size_t>(b)];
            search.run(terminals[static_cast<std::size_t>(a)], kInf, [&](int face, std::int64_t) { return face != target; });
            for (int f = target; search.pred(f) >= 0;) {
                const int k = search.pred(f);
                const int d = dual.dart[static_cast<std::size_t>(k)];
                unsatisfied[static_cast<std::size_t>(d >> 1)] ^= 1;
                f = emb.face_of_dart[static_cast<std::size_t>(d)];
            }
        }
    }

    // Spins along a BFS tree in index order, spin +1 at each component root.
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(instance.n));
    for (std::size_t e = 0; e < emb.edges.size(); ++e) {
        adj[static_cast<std::size_t>(emb.edges[e].u)].emplace_back(emb.edges[e].v, static_cast<int>(e));
        adj[static_cast<std::size_t>(emb.edges[e].v)].emplace_back(emb.edges[e].u, static_cast<int>(e));
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    std::vector<std::int8_t> spins(static_cast<std::size_t>(instance.n), 0);
    std::vector<int> queue;
    for (int root = 0; root < instance.n; ++root) {
        if (spins[static_cast<std::size_t>(root)] != 0) continue;
        spins[static_cast<std::size_t>(root)] = 1;
        queue.assign(1, root);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int v = queue[qi];
            for (const auto& [w, e] : adj[static_cast<std::size_t>(v)]) {
                if (spins[static_cast<std::size_t>(w)] != 0) continue;
                const std::int64_t J = emb.edges[static_cast<std::size_t>(e)].coupling;
                // Satisfied: s_v s_w = -sign(J).
                int product = J < 0 ? 1 : -1;
                if (unsatisfied[static_cast<std::size_t>(e)]) product = -product;
                spins[static_cast<std::size_t>(w)] = static_cast<std::int8_t>(spins[static_cast<std::size_t>(v)] * product);
                queue.push_back(w);
            }
        }
    }

    std::int64_t abs_sum = 0;
    for (const auto& e : emb.edges) abs_sum += std::abs(e.coupling);
    const std::int64_t e0 = -abs_sum + 2 * out.matching_weight;
    out.config = SpinConfiguration(std::move(spins));
    out.energy = Decimal{e0, instance.denominator};
    const std::int64_t check = energy_scaled(instance, out.config.spins());
    if (check != e0) {
        throw std::logic_error("ground-state energy identity violated: matching gives " + std::to_string(e0) +
                               ", configuration gives " + std::to_string(check));
    }
    return out;
}

TimedGroundState solve_timed(const IsingInstance& instance, int repetitions, const GroundStateOptions& options) {
    if (repetitions < 1) throw InputError("timing repetitions must be at least 1");
    TimedGroundState out;
    for (int r = 0; r < repetitions; ++r) {
        const auto start = std::chrono::steady_clock::now();
        GroundState gs = ground_state(instance, options);
        const auto stop = std::chrono::steady_clock::now();
        out.times_us.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
        if (r == 0) {
            out.result = std::move(gs);
        } else if (!(gs.energy == out.result.energy) || !(gs.config == out.result.config)) {
            throw std::logic_error("nondeterministic ground state across repetitions");
        }
    }
    std::vector<double> sorted = out.times_us;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    out.median_us = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    return out;
}

}  // namespace spinbench::planar
