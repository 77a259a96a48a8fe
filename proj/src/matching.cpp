#include "spinbench/matching.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace spinbench::matching {

// Conventions follow the classic array formulation of the algorithm:
// edge k has endpoints 2k (= eu_[k]) and 2k+1 (= ev_[k]); "endpoint p"
// refers to vertex endpoint(p); mate_[v] stores the remote endpoint index.
// Labels: 0 free, 1 = S (outer), 2 = T (inner); bit 4 marks a breadcrumb
// during scan_blossom.  Blossom ids are n..2n-1.

namespace {
constexpr int kNone = -1;
}

PerfectMatcher::PerfectMatcher(const WeightedGraph& graph) : n_(graph.nodes) {
    if (n_ < 0) throw InputError("negative node count");
    const auto& edges = graph.edges;
    for (const auto& e : edges) {
        if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_) throw InputError("matching: edge endpoint out of range");
        if (e.u == e.v) throw InputError("matching: self-loop");
        if (e.w < 0) throw InputError("matching: negative edge weight");
    }
    // Parallel edges collapse to the lightest copy, placed where the pair
    // first appears so the caller's edge order still decides ties.
    const auto key = [&](std::size_t k) { return std::minmax(edges[k].u, edges[k].v); };
    std::vector<std::size_t> order(edges.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ka = key(a), kb = key(b);
        return ka != kb ? ka < kb : a < b;
    });
    std::vector<std::int64_t> lightest(edges.size(), -1);  // at the first occurrence only
    std::int64_t maxw = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::int64_t w = edges[order[i]].w;
        while (j < order.size() && key(order[j]) == key(order[i])) w = std::min(w, edges[order[j++]].w);
        lightest[order[i]] = w;
        maxw = std::max(maxw, w);
        i = j;
    }
    shift_ = maxw;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (lightest[k] < 0) continue;
        eu_.push_back(edges[k].u);
        ev_.push_back(edges[k].v);
        wt_.push_back(2 * (shift_ - lightest[k]));
    }
}

std::int64_t PerfectMatcher::slack(int k) const {
    return dualvar_[static_cast<std::size_t>(eu_[k])] + dualvar_[static_cast<std::size_t>(ev_[k])] - 2 * wt_[k];
}

void PerfectMatcher::blossom_leaves(int b, std::vector<int>& out) const {
    if (b < n_) {
        out.push_back(b);
        return;
    }
    for (int t : blossomchilds_[b]) {
        if (t < n_) out.push_back(t);
        else blossom_leaves(t, out);
    }
}

void PerfectMatcher::assign_label(int w, int t, int p) {
    const auto endpoint = [&](int q) { return (q & 1) ? ev_[q >> 1] : eu_[q >> 1]; };
    for (;;) {
        const int b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = kNone;
        if (t == 1) {
            blossom_leaves(b, queue_);
            return;
        }
        const int base = blossombase_[b];
        const int mp = mate_[base];
        w = endpoint(mp);
        t = 1;
        p = mp ^ 1;
    }
}

int PerfectMatcher::scan_blossom(int v, int w) {
    const auto endpoint = [&](int q) { return (q & 1) ? ev_[q >> 1] : eu_[q >> 1]; };
    std::vector<int> path;
    int base = kNone;
    while (v != kNone || w != kNone) {
        int b = inblossom_[v];
        if (label_[b] & 4) {
            base = blossombase_[b];
            break;
        }
        path.push_back(b);
        label_[b] = 5;
        if (labelend_[b] == kNone) {
            v = kNone;
        } else {
            v = endpoint(labelend_[b]);
            b = inblossom_[v];
            v = endpoint(labelend_[b]);
        }
        if (w != kNone) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
}

void PerfectMatcher::add_blossom(int base, int k) {
    const auto endpoint = [&](int q) { return (q & 1) ? ev_[q >> 1] : eu_[q >> 1]; };
    int v = eu_[k];
    int w = ev_[k];
    const int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    const int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = kNone;
    blossomparent_[bb] = b;
    auto& path = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
        blossomparent_[bv] = b;
        path.push_back(bv);
        endps.push_back(labelend_[bv]);
        v = endpoint(labelend_[bv]);
        bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
        blossomparent_[bw] = b;
        path.push_back(bw);
        endps.push_back(labelend_[bw] ^ 1);
        w = endpoint(labelend_[bw]);
        bw = inblossom_[w];
    }
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0;
    std::vector<int> leaves;
    blossom_leaves(b, leaves);
    for (int x : leaves) {
        if (label_[inblossom_[x]] == 2) queue_.push_back(x);
        inblossom_[x] = b;
    }

    std::vector<int> bestedgeto(static_cast<std::size_t>(2 * n_), kNone);
    for (int sub : path) {
        std::vector<int> candidates;
        if (!has_bestedges_[sub]) {
            std::vector<int> subleaves;
            blossom_leaves(sub, subleaves);
            for (int x : subleaves) {
                for (int p : neighbend_[x]) candidates.push_back(p >> 1);
            }
        } else {
            candidates = blossombestedges_[sub];
        }
        for (int kk : candidates) {
            int i = eu_[kk];
            int j = ev_[kk];
            if (inblossom_[j] == b) std::swap(i, j);
            const int bj = inblossom_[j];
            if (bj != b && label_[bj] == 1 &&
                (bestedgeto[bj] == kNone || slack(kk) < slack(bestedgeto[bj]))) {
                bestedgeto[bj] = kk;
            }
        }
        blossombestedges_[sub].clear();
        has_bestedges_[sub] = 0;
        bestedge_[sub] = kNone;
    }
    auto& best = blossombestedges_[b];
    best.clear();
    for (int kk : bestedgeto) {
        if (kk != kNone) best.push_back(kk);
    }
    has_bestedges_[b] = 1;
    bestedge_[b] = kNone;
    for (int kk : best) {
        if (bestedge_[b] == kNone || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
    }
}

void PerfectMatcher::expand_blossom(int b, bool endstage) {
    const auto endpoint = [&](int q) { return (q & 1) ? ev_[q >> 1] : eu_[q >> 1]; };
    const std::vector<int> childs = blossomchilds_[b];
    for (int s : childs) {
        blossomparent_[s] = kNone;
        if (s < n_) {
            inblossom_[s] = s;
        } else if (endstage && dualvar_[s] == 0) {
            expand_blossom(s, endstage);
        } else {
            std::vector<int> leaves;
            blossom_leaves(s, leaves);
            for (int x : leaves) inblossom_[x] = s;
        }
    }
    if (!endstage && label_[b] == 2) {
        const auto& endps = blossomendps_[b];
        const int len = static_cast<int>(childs.size());
        const auto at = [len](int j) { return static_cast<std::size_t>(((j % len) + len) % len); };
        const int entrychild = inblossom_[endpoint(labelend_[b] ^ 1)];
        int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
        int jstep;
        int endptrick;
        if (j & 1) {
            j -= len;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        int p = labelend_[b];
        while (j != 0) {
            label_[endpoint(p ^ 1)] = 0;
            label_[endpoint(endps[at(j - endptrick)] ^ endptrick ^ 1)] = 0;
            assign_label(endpoint(p ^ 1), 2, p);
            allowedge_[static_cast<std::size_t>(endps[at(j - endptrick)] >> 1)] = 1;
            j += jstep;
            p = endps[at(j - endptrick)] ^ endptrick;
            allowedge_[static_cast<std::size_t>(p >> 1)] = 1;
            j += jstep;
        }
        int bv = childs[at(j)];
        label_[endpoint(p ^ 1)] = label_[bv] = 2;
        labelend_[endpoint(p ^ 1)] = labelend_[bv] = p;
        bestedge_[bv] = kNone;
        j += jstep;
        while (childs[at(j)] != entrychild) {
            bv = childs[at(j)];
            if (label_[bv] == 1) {
                j += jstep;
                continue;
            }
            std::vector<int> leaves;
            blossom_leaves(bv, leaves);
            int found = kNone;
            for (int x : leaves) {
                if (label_[x] != 0) {
                    found = x;
                    break;
                }
            }
            if (found != kNone) {
                label_[found] = 0;
                label_[endpoint(mate_[blossombase_[bv]])] = 0;
                assign_label(found, 2, labelend_[found]);
            }
            j += jstep;
        }
    }
    label_[b] = labelend_[b] = kNone;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = kNone;
    blossombestedges_[b].clear();
    has_bestedges_[b] = 0;
    bestedge_[b] = kNone;
    unusedblossoms_.push_back(b);
}

void PerfectMatcher::augment_blossom(int b, int v) {
    const auto endpoint = [&](int q) { return (q & 1) ? ev_[q >> 1] : eu_[q >> 1]; };
    int t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= n_) augment_blossom(t, v);
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const int len = static_cast<int>(childs.size());
    const auto at = [len](int j) { return static_cast<std::size_t>(((j % len) + len) % len); };
    const int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    int j = i;
    int jstep;
    int endptrick;
    if (i & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
    } else {
        jstep = -1;
        endptrick = 1;
    }
    while (j != 0) {
        j += jstep;
        t = childs[at(j)];
        const int p = endps[at(j - endptrick)] ^ endptrick;
        if (t >= n_) augment_blossom(t, endpoint(p));
        j += jstep;
        t = childs[at(j)];
        if (t >= n_) augment_blossom(t, endpoint(p ^ 1));
        mate_[endpoint(p)] = p ^ 1;
        mate_[endpoint(p ^ 1)] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
}

void PerfectMatcher::augment_matching(int k) {
    const auto endpoint = [&](int q) { return (q & 1) ? ev_[q >> 1] : eu_[q >> 1]; };
    const int starts[2][2] = {{eu_[k], 2 * k + 1}, {ev_[k], 2 * k}};
    for (const auto& start : starts) {
        int s = start[0];
        int p = start[1];
        for (;;) {
            const int bs = inblossom_[s];
            if (bs >= n_) augment_blossom(bs, s);
            mate_[s] = p;
            if (labelend_[bs] == kNone) break;
            const int t = endpoint(labelend_[bs]);
            const int bt = inblossom_[t];
            s = endpoint(labelend_[bt]);
            const int j = endpoint(labelend_[bt] ^ 1);
            if (bt >= n_) augment_blossom(bt, j);
            mate_[j] = labelend_[bt];
            p = labelend_[bt] ^ 1;
        }
    }
}

bool PerfectMatcher::solve() {
    const int n = n_;
    const int m = static_cast<int>(eu_.size());
    const auto endpoint = [&](int q) { return (q & 1) ? ev_[q >> 1] : eu_[q >> 1]; };
    const auto N = static_cast<std::size_t>(n);

    neighbend_.assign(N, {});
    for (int k = 0; k < m; ++k) {
        neighbend_[static_cast<std::size_t>(eu_[k])].push_back(2 * k + 1);
        neighbend_[static_cast<std::size_t>(ev_[k])].push_back(2 * k);
    }
    mate_.assign(N, kNone);
    label_.assign(2 * N, 0);
    labelend_.assign(2 * N, kNone);
    inblossom_.resize(N);
    for (int v = 0; v < n; ++v) inblossom_[v] = v;
    blossomparent_.assign(2 * N, kNone);
    blossomchilds_.assign(2 * N, {});
    blossombase_.assign(2 * N, kNone);
    for (int v = 0; v < n; ++v) blossombase_[v] = v;
    blossomendps_.assign(2 * N, {});
    bestedge_.assign(2 * N, kNone);
    blossombestedges_.assign(2 * N, {});
    has_bestedges_.assign(2 * N, 0);
    unusedblossoms_.clear();
    for (int b = 2 * n - 1; b >= n; --b) unusedblossoms_.push_back(b);
    dualvar_.assign(2 * N, 0);
    for (int k = 0; k < m; ++k) {
        dualvar_[eu_[k]] = std::max(dualvar_[eu_[k]], wt_[k]);
        dualvar_[ev_[k]] = std::max(dualvar_[ev_[k]], wt_[k]);
    }
    allowedge_.assign(static_cast<std::size_t>(m), 0);
    queue_.clear();

    // Greedy start: lower each free vertex's dual until an edge becomes
    // tight and match it when the far end is free.  Weights are doubled and
    // all starting duals even, so S-S slacks stay even as in a cold start.
    for (int v = 0; v < n; ++v) {
        if (mate_[v] != kNone || neighbend_[v].empty()) continue;
        std::int64_t lowest = std::numeric_limits<std::int64_t>::min();
        for (int p : neighbend_[v]) lowest = std::max(lowest, 2 * wt_[p >> 1] - dualvar_[endpoint(p)]);
        dualvar_[v] = lowest;
        for (int p : neighbend_[v]) {
            const int w = endpoint(p);
            if (mate_[w] == kNone && slack(p >> 1) == 0) {
                mate_[v] = p;
                mate_[w] = p ^ 1;
                break;
            }
        }
    }

    for (int stage = 0; stage < n; ++stage) {
        std::fill(label_.begin(), label_.end(), 0);
        std::fill(bestedge_.begin(), bestedge_.end(), kNone);
        for (int b = n; b < 2 * n; ++b) {
            blossombestedges_[b].clear();
            has_bestedges_[b] = 0;
        }
        std::fill(allowedge_.begin(), allowedge_.end(), 0);
        queue_.clear();
        for (int v = 0; v < n; ++v) {
            if (mate_[v] == kNone && label_[inblossom_[v]] == 0) assign_label(v, 1, kNone);
        }
        bool augmented = false;
        for (;;) {
            while (!queue_.empty() && !augmented) {
                const int v = queue_.back();
                queue_.pop_back();
                for (int p : neighbend_[v]) {
                    const int k = p >> 1;
                    const int w = endpoint(p);
                    if (inblossom_[v] == inblossom_[w]) continue;
                    std::int64_t kslack = 0;
                    if (!allowedge_[k]) {
                        kslack = slack(k);
                        if (kslack <= 0) allowedge_[k] = 1;
                    }
                    if (allowedge_[k]) {
                        if (label_[inblossom_[w]] == 0) {
                            assign_label(w, 2, p ^ 1);
                        } else if (label_[inblossom_[w]] == 1) {
                            const int base = scan_blossom(v, w);
                            if (base >= 0) {
                                add_blossom(base, k);
                            } else {
                                augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if (label_[w] == 0) {
                            label_[w] = 2;
                            labelend_[w] = p ^ 1;
                        }
                    } else if (label_[inblossom_[w]] == 1) {
                        const int b = inblossom_[v];
                        if (bestedge_[b] == kNone || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                    } else if (label_[w] == 0) {
                        if (bestedge_[w] == kNone || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                    }
                }
            }
            if (augmented) break;

            // No augmenting path on tight edges: adjust the duals.
            int deltatype = -1;
            std::int64_t delta = 0;
            int deltaedge = kNone;
            int deltablossom = kNone;
            for (int v = 0; v < n; ++v) {
                if (label_[inblossom_[v]] == 0 && bestedge_[v] != kNone) {
                    const std::int64_t d = slack(bestedge_[v]);
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 2;
                        deltaedge = bestedge_[v];
                    }
                }
            }
            for (int b = 0; b < 2 * n; ++b) {
                if (blossomparent_[b] == kNone && label_[b] == 1 && bestedge_[b] != kNone) {
                    const std::int64_t d = slack(bestedge_[b]) / 2;
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 3;
                        deltaedge = bestedge_[b];
                    }
                }
            }
            for (int b = n; b < 2 * n; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == kNone && label_[b] == 2 &&
                    (deltatype == -1 || dualvar_[b] < delta)) {
                    delta = dualvar_[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if (deltatype == -1) {
                // Maximum cardinality reached without a perfect matching.
                deltatype = 1;
                delta = std::max<std::int64_t>(
                    0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n));
            }
            for (int v = 0; v < n; ++v) {
                const int l = label_[inblossom_[v]];
                if (l == 1) dualvar_[v] -= delta;
                else if (l == 2) dualvar_[v] += delta;
            }
            for (int b = n; b < 2 * n; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == kNone) {
                    if (label_[b] == 1) dualvar_[b] += delta;
                    else if (label_[b] == 2) dualvar_[b] -= delta;
                }
            }
            if (deltatype == 1) {
                break;
            } else if (deltatype == 2) {
                allowedge_[deltaedge] = 1;
                int i = eu_[deltaedge];
                int j = ev_[deltaedge];
                if (label_[inblossom_[i]] == 0) std::swap(i, j);
                queue_.push_back(i);
            } else if (deltatype == 3) {
                allowedge_[deltaedge] = 1;
                queue_.push_back(eu_[deltaedge]);
            } else {
                expand_blossom(deltablossom, false);
            }
        }
        if (!augmented) break;
        for (int b = n; b < 2 * n; ++b) {
            if (blossomparent_[b] == kNone && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0) {
                expand_blossom(b, true);
            }
        }
    }

    mate_vertex_.assign(N, kNone);
    perfect_ = true;
    for (int v = 0; v < n; ++v) {
        if (mate_[v] >= 0) mate_vertex_[v] = endpoint(mate_[v]);
        else perfect_ = false;
    }
    solved_ = true;
    return perfect_;
}

Matching PerfectMatcher::matching() const {
    Matching out;
    std::map<std::pair<int, int>, std::int64_t> weight;
    for (std::size_t k = 0; k < eu_.size(); ++k) weight[std::minmax(eu_[k], ev_[k])] = shift_ - wt_[k] / 2;
    for (int v = 0; v < n_; ++v) {
        const int u = mate_vertex_[static_cast<std::size_t>(v)];
        if (u > v) {
            out.pairs.emplace_back(v, u);
            out.total_weight += weight.at({v, u});
        }
    }
    return out;
}

std::int64_t PerfectMatcher::reduced_cost2(int u, int v, std::int64_t w) const {
    if (!solved_) throw PreconditionError("reduced_cost2 queried before solve()");
    std::int64_t s = dualvar_[static_cast<std::size_t>(u)] + dualvar_[static_cast<std::size_t>(v)] - 4 * (shift_ - w);
    // Add the duals of blossoms containing both ends; usually there are none.
    if (blossomparent_[u] == kNone || blossomparent_[v] == kNone) return s;
    const auto depth = [&](int x) {
        int k = 0;
        for (; blossomparent_[x] != kNone; x = blossomparent_[x]) ++k;
        return k;
    };
    int a = u, b = v;
    int da = depth(a), db = depth(b);
    for (; da > db; --da) a = blossomparent_[a];
    for (; db > da; --db) b = blossomparent_[b];
    while (a != b) {
        a = blossomparent_[a];
        b = blossomparent_[b];
    }
    for (; a != kNone; a = blossomparent_[a]) s += 2 * dualvar_[static_cast<std::size_t>(a)];
    return s;
}

std::int64_t PerfectMatcher::pricing_limit(int u) const {
    if (!solved_) throw PreconditionError("pricing_limit queried before solve()");
    // Internal weights are 2(C - w).  Violation needs 4(C - w) > d_u + d_v + 2z
    // >= 2 min(d_u, d_v), so w < C - d/2 at the endpoint with the smaller dual.
    const std::int64_t d = dualvar_[static_cast<std::size_t>(u)];
    const std::int64_t half = d >= 0 ? d / 2 : -((-d + 1) / 2);
    return shift_ - half;
}

Matching min_weight_perfect_matching(const WeightedGraph& graph) {
    if (graph.nodes % 2 != 0) {
        throw PreconditionError("perfect matching requires an even node count, got " + std::to_string(graph.nodes));
    }
    PerfectMatcher matcher(graph);
    if (!matcher.solve()) throw PreconditionError("graph has no perfect matching");
    return matcher.matching();
}

bool verify_matching(const WeightedGraph& graph, const Matching& m) {
    if (graph.nodes < 0 || graph.nodes % 2 != 0) return false;
    if (m.pairs.size() * 2 != static_cast<std::size_t>(graph.nodes)) return false;
    std::map<std::pair<int, int>, std::int64_t> weight;
    for (const auto& e : graph.edges) {
        const auto key = std::minmax(e.u, e.v);
        auto [it, inserted] = weight.emplace(key, e.w);
        if (!inserted) it->second = std::min(it->second, e.w);
    }
    std::vector<char> covered(static_cast<std::size_t>(graph.nodes), 0);
    std::int64_t total = 0;
    for (const auto& [u, v] : m.pairs) {
        if (u < 0 || v < 0 || u >= graph.nodes || v >= graph.nodes || u == v) return false;
        if (covered[static_cast<std::size_t>(u)] || covered[static_cast<std::size_t>(v)]) return false;
        covered[static_cast<std::size_t>(u)] = covered[static_cast<std::size_t>(v)] = 1;
        const auto it = weight.find(std::minmax(u, v));
        if (it == weight.end()) return false;
        total += it->second;
    }
    return total == m.total_weight;
}

WeightedGraph parse_weighted_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    WeightedGraph g;
    bool have_n = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (!have_n) {
            if (!(ls >> g.nodes) || g.nodes < 0) throw InputError("line " + std::to_string(lineno) + ": bad node count");
            have_n = true;
            continue;
        }
        WeightedEdge e;
        std::string rest;
        if (!(ls >> e.u >> e.v >> e.w) || (ls >> rest)) {
            throw InputError("line " + std::to_string(lineno) + ": expected 'u v w'");
        }
        if (e.u < 0 || e.v < 0 || e.u >= g.nodes || e.v >= g.nodes) {
            throw InputError("line " + std::to_string(lineno) + ": index out of range");
        }
        g.edges.push_back(e);
    }
    if (!have_n) throw InputError("missing node count line");
    return g;
}

}  // namespace spinbench::matching
