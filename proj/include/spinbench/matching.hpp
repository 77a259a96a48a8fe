#pragma once

// Exact minimum-weight perfect matching on general graphs.
//
// Edmonds' primal-dual blossom algorithm in the O(n^3) formulation with
// per-blossom best-edge lists.  Weights are non-negative integers; the
// solver works internally on w' = C - w and maximizes cardinality first, so
// every intermediate dual value stays integral.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spinbench/errors.hpp"

namespace spinbench::matching {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    std::int64_t w = 0;
};

struct WeightedGraph {
    int nodes = 0;
    std::vector<WeightedEdge> edges;

    void add_edge(int u, int v, std::int64_t w) { edges.push_back({u, v, w}); }
};

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // u < v, sorted by u
    std::int64_t total_weight = 0;
};

/// Solver object kept alive after solve() so callers can query the final
/// dual solution, e.g. to certify that edges left out of the graph cannot
/// improve the matching.
class PerfectMatcher {
public:
    explicit PerfectMatcher(const WeightedGraph& graph);

    /// Runs the blossom algorithm.  Returns false when the graph has no
    /// perfect matching (the maximum-cardinality matching is then kept).
    bool solve();

    Matching matching() const;
    const std::vector<int>& mates() const { return mate_vertex_; }

    /// Reduced cost of a candidate edge (u, v, w) under the final duals, in
    /// internal units (a fixed positive multiple).  Negative values mean
    /// adding the edge could lower the weight.
    std::int64_t reduced_cost2(int u, int v, std::int64_t w) const;

    /// An edge with negative reduced cost is lighter than this limit at one
    /// of its endpoints at least.
    std::int64_t pricing_limit(int u) const;

private:
    // Helpers named after the roles they play in Edmonds' algorithm.
    std::int64_t slack(int k) const;
    void blossom_leaves(int b, std::vector<int>& out) const;
    void assign_label(int w, int t, int p);
    int scan_blossom(int v, int w);
    void add_blossom(int base, int k);
    void expand_blossom(int b, bool endstage);
    void augment_blossom(int b, int v);
    void augment_matching(int k);

    int n_ = 0;
    std::int64_t shift_ = 0;  // C in w' = C - w
    std::vector<int> eu_, ev_;
    std::vector<std::int64_t> wt_;  // 2 (C - w), doubled to keep duals integral
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;         // endpoint index, -1 if single
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<char> has_bestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<std::int64_t> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
    std::vector<int> mate_vertex_;
    bool solved_ = false;
    bool perfect_ = false;
};

/// Throws PreconditionError for an odd node count or when no perfect
/// matching exists.  Output depends only on the input edge order.
Matching min_weight_perfect_matching(const WeightedGraph& graph);

bool verify_matching(const WeightedGraph& graph, const Matching& m);

/// Edge-list text: node count line, then "u v w" lines.
WeightedGraph parse_weighted_graph(const std::string& text);

}  // namespace spinbench::matching
