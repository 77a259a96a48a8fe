#include "spinbench/fcl.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace spinbench::fcl {

namespace {

std::string format_double(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

std::int64_t key(int u, int v) {
    return (static_cast<std::int64_t>(std::min(u, v)) << 32) | static_cast<std::uint32_t>(std::max(u, v));
}

Loop sample_from(const std::vector<std::vector<int>>& adj, Rng& rng, int max_attempts) {
    const int nodes = static_cast<int>(adj.size());
    if (nodes < 1) throw InputError("sample_loop: empty graph");
    std::vector<int> index_in_walk(static_cast<std::size_t>(nodes), -1);
    std::vector<int> walk;
    std::vector<int> options;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (int v : walk) index_in_walk[static_cast<std::size_t>(v)] = -1;
        walk.clear();
        int current = rng.index(nodes);
        int previous = -1;
        for (;;) {
            index_in_walk[static_cast<std::size_t>(current)] = static_cast<int>(walk.size());
            walk.push_back(current);
            options.clear();
            for (int w : adj[static_cast<std::size_t>(current)]) {
                if (w != previous) options.push_back(w);
            }
            if (options.empty()) break;  // dead end: restart
            const int next = options[static_cast<std::size_t>(rng.index(static_cast<int>(options.size())))];
            const int seen = index_in_walk[static_cast<std::size_t>(next)];
            if (seen >= 0) {
                Loop loop;
                loop.nodes.assign(walk.begin() + seen, walk.end());
                if (loop.nodes.size() < 4) break;
                const std::size_t L = loop.nodes.size();
                for (std::size_t k = 0; k < L; ++k) {
                    const int a = loop.nodes[k];
                    const int b = loop.nodes[(k + 1) % L];
                    loop.edges.emplace_back(std::min(a, b), std::max(a, b));
                }
                loop.antiferromagnetic_edge = rng.index(static_cast<int>(L));
                for (int v : walk) index_in_walk[static_cast<std::size_t>(v)] = -1;
                return loop;
            }
            previous = current;
            current = next;
        }
    }
    for (int v : walk) index_in_walk[static_cast<std::size_t>(v)] = -1;
    throw BudgetExhausted("sample_loop: no cycle found within " + std::to_string(max_attempts) + " walks");
}

}  // namespace

void FclParams::validate() const {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw InputError("fcl: alpha must be positive");
    if (rho < 1) throw InputError("fcl: rho must be at least 1");
    if (ruggedness < rho) throw InputError("fcl: ruggedness R must satisfy R >= rho");
    if (max_loop_rejections < 0 || max_instance_rejections < 1) throw InputError("fcl: invalid rejection budgets");
}

int FclParams::loop_count(int nodes) const { return static_cast<int>(std::lround(alpha * nodes)); }

Loop sample_loop(const topology::TopologyGraph& graph, Rng& rng, int max_attempts) {
    return sample_from(graph.adjacency(), rng, max_attempts);
}

bool coupling_graph_connected(const IsingInstance& instance) {
    const Adjacency adj(instance);
    int start = -1;
    int touched = 0;
    for (int v = 0; v < instance.n; ++v) {
        if (!adj.sites[static_cast<std::size_t>(v)].empty()) {
            if (start < 0) start = v;
            ++touched;
        }
    }
    if (start < 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(instance.n), 0);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    int reached = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++reached;
        for (const auto& e : adj.sites[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(e.neighbor)]) {
                seen[static_cast<std::size_t>(e.neighbor)] = 1;
                stack.push_back(e.neighbor);
            }
        }
    }
    return reached == touched;
}

IsingInstance generate_fcl(const topology::TopologyGraph& graph, const FclParams& params) {
    params.validate();
    const int loops = params.loop_count(graph.nodes);
    std::unordered_map<std::int64_t, std::size_t> edge_index;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) edge_index[key(graph.edges[e].first, graph.edges[e].second)] = e;

    const auto adj = graph.adjacency();
    std::vector<std::int64_t> J(graph.edges.size());
    std::vector<std::size_t> touched;
    for (int regeneration = 0; regeneration < params.max_instance_rejections; ++regeneration) {
        Rng rng(params.seed + static_cast<std::uint64_t>(regeneration));
        std::fill(J.begin(), J.end(), 0);
        long rejections = 0;
        long consecutive = 0;
        bool stuck = false;
        for (int accepted = 0; accepted < loops && !stuck;) {
            const Loop loop = sample_from(adj, rng, 10000);
            touched.clear();
            bool fits = true;
            for (std::size_t k = 0; k < loop.edges.size(); ++k) {
                const std::size_t e = edge_index.at(key(loop.edges[k].first, loop.edges[k].second));
                const std::int64_t next = J[e] + (static_cast<int>(k) == loop.antiferromagnetic_edge ? 1 : -1);
                if (std::abs(next) > params.rho) {
                    fits = false;
                    break;
                }
                touched.push_back(e);
            }
            if (!fits) {
                ++rejections;
                // Saturated couplings can leave no admissible loop at all.
                stuck = ++consecutive > params.max_loop_rejections;
                continue;
            }
            consecutive = 0;
            for (std::size_t k = 0; k < touched.size(); ++k) {
                J[touched[k]] += static_cast<int>(k) == loop.antiferromagnetic_edge ? 1 : -1;
            }
            ++accepted;
        }

        if (stuck) continue;

        IsingInstance inst;
        inst.n = graph.nodes;
        inst.topology = graph.kind;
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            if (J[e] != 0) inst.couplings.push_back({graph.edges[e].first, graph.edges[e].second, J[e]});
        }
        if (!coupling_graph_connected(inst)) continue;

        inst.planted = SpinConfiguration::uniform(inst.n);
        inst.metadata.generator = "fcl";
        inst.metadata.rng = Rng::kAlgorithm;
        inst.metadata.params = {
            {"alpha", format_double(params.alpha)},
            {"rho", std::to_string(params.rho)},
            {"R", std::to_string(params.ruggedness)},
            {"seed", std::to_string(params.seed)},
            {"loops", std::to_string(loops)},
            {"regeneration", std::to_string(regeneration)},
            {"loop_rejections", std::to_string(rejections)},
        };
        return inst;
    }
    throw BudgetExhausted("fcl: every one of " + std::to_string(params.max_instance_rejections) +
                          " generated instances was disconnected or ran out of admissible loops");
}

Decimal planted_energy(const IsingInstance& instance) {
    if (!instance.planted) throw InputError("instance has no planted configuration");
    return energy(instance, *instance.planted);
}

}  // namespace spinbench::fcl
