#pragma once

#include <set>
#include <unordered_map>

#include "looptnn/word.hpp"

namespace looptnn {
namespace cylnet {

// Weighted acyclic network on a cylinder, n sources on the bottom boundary
// and n sinks on the top, numbered counterclockwise.  The chord is implicit:
// each edge carries its signed crossing count c(e) (counterclockwise minus
// clockwise crossings).  Acyclicity comes from a strict height function.
struct Vertex {
    int id;
    long long height;
};

struct Edge {
    int from, to;
    Rat weight;
    int cross;
};

struct CylNetwork {
    int n = 1;
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<int> sources, sinks; // vertex ids, 1..n in counterclockwise order

    void validate() const {
        if (static_cast<int>(sources.size()) != n || static_cast<int>(sinks.size()) != n)
            fail("BAD_INPUT", "need exactly n sources and n sinks");
        std::set<int> ids;
        std::set<long long> heights;
        for (const auto& v : vertices) {
            if (!ids.insert(v.id).second) fail("BAD_INPUT", "duplicate vertex id");
            if (!heights.insert(v.height).second)
                fail("BAD_INPUT", "vertices must have pairwise distinct heights");
        }
        std::map<int, long long> h;
        for (const auto& v : vertices) h[v.id] = v.height;
        std::set<int> src(sources.begin(), sources.end()), snk(sinks.begin(), sinks.end());
        for (const auto& e : edges) {
            if (!ids.count(e.from) || !ids.count(e.to)) fail("BAD_INPUT", "edge endpoint unknown");
            if (h[e.from] >= h[e.to]) fail("BAD_INPUT", "edges must increase in height");
            if (e.weight < 0) fail("BAD_INPUT", "edge weights must be nonnegative");
            if (snk.count(e.from)) fail("BAD_INPUT", "sinks must have outdegree 0");
            if (src.count(e.to)) fail("BAD_INPUT", "sources must have indegree 0");
        }
    }

    long long height_of(int id) const {
        for (const auto& v : vertices)
            if (v.id == id) return v.height;
        fail("BAD_INPUT", "unknown vertex id");
    }
};

inline long long alpha(long long i, int n) {
    long long r = (i - 1) % n;
    if (r < 0) r += n;
    return (i - (r + 1)) / n;
}

// ---------------------------------------------------------------------------
// evaluation: x_{i,j} = sum of weights of paths v_i -> w_j with
// rot = alpha(j) - alpha(i)

inline PeriodicBandMatrix network_eval(const CylNetwork& net, int d_window = 64) {
    net.validate();
    int n = net.n;
    std::vector<int> order;
    for (const auto& v : net.vertices) order.push_back(v.id);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return net.height_of(a) < net.height_of(b);
    });
    std::vector<std::vector<std::map<int, Rat>>> reach(n + 1);
    // reach[s][vertex-rank] : rot -> weight
    std::map<int, int> rank;
    for (size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
    std::map<std::pair<long long, int>, Rat> entries; // (offset, row) collected
    std::map<int, int> sink_index;
    for (int t = 1; t <= n; ++t) sink_index[net.sinks[t - 1]] = t;
    long long lo = 0, hi = 0;
    bool any = false;
    std::vector<std::map<int, Rat>> acc;
    for (int s = 1; s <= n; ++s) {
        acc.assign(order.size(), {});
        acc[rank[net.sources[s - 1]]][0] = Rat(1);
        for (size_t r = 0; r < order.size(); ++r) {
            if (acc[r].empty()) continue;
            int u = order[r];
            for (const auto& e : net.edges) {
                if (e.from != u || e.weight == 0) continue;
                for (const auto& [rot, w] : acc[r]) acc[rank[e.to]][rot + e.cross] += w * e.weight;
            }
        }
        for (int t = 1; t <= n; ++t)
            for (const auto& [rot, w] : acc[rank[net.sinks[t - 1]]]) {
                if (w == 0) continue;
                // the (s, j)-path condition: j = t + n*rot has alpha(j) = rot
                long long j = t + static_cast<long long>(n) * rot;
                long long d = j - s;
                entries[{d, s}] += w;
                lo = any ? std::min(lo, d) : d;
                hi = any ? std::max(hi, d) : d;
                any = true;
            }
    }
    if (!any) { lo = 0; hi = 0; }
    if (hi - lo > 2 * static_cast<long long>(d_window) + 512)
        fail("BUDGET_EXCEEDED", "network evaluation window too large");
    PeriodicBandMatrix x(n, static_cast<int>(std::min(lo, 0LL)), static_cast<int>(std::max(hi, 0LL)),
                         true);
    for (const auto& [key, w] : entries) x.set(key.second, static_cast<int>(key.first), w);
    return x;
}

// ---------------------------------------------------------------------------
// paths and crossings

struct CylPath {
    long long from_index, to_index; // an (i,j)-path: v_{bar i} -> w_{bar j}
    std::vector<int> edge_ids;      // indices into net.edges

    Rat weight(const CylNetwork& net) const {
        Rat w(1);
        for (int e : edge_ids) w *= net.edges[e].weight;
        return w;
    }
    int rot(const CylNetwork& net) const {
        int r = 0;
        for (int e : edge_ids) r += net.edges[e].cross;
        return r;
    }
    std::vector<int> vertex_ids(const CylNetwork& net) const {
        std::vector<int> vs;
        if (edge_ids.empty()) return vs;
        vs.push_back(net.edges[edge_ids.front()].from);
        for (int e : edge_ids) vs.push_back(net.edges[e].to);
        return vs;
    }
    int rot_after(const CylNetwork& net, int vertex) const {
        int r = 0;
        bool after = false;
        int cur = net.edges[edge_ids.front()].from;
        if (cur == vertex) after = true;
        for (int e : edge_ids) {
            if (after) r += net.edges[e].cross;
            if (net.edges[e].to == vertex) after = true;
        }
        return r;
    }
    bool visits(const CylNetwork& net, int vertex) const {
        for (int v : vertex_ids(net))
            if (v == vertex) return true;
        return false;
    }
};

// all (i,j)-paths (right endpoint class and rotor fixed by i,j)
inline std::vector<CylPath> enumerate_ij_paths(const CylNetwork& net, long long i, long long j,
                                               long long budget = 200000) {
    net.validate();
    int n = net.n;
    int src = net.sources[static_cast<size_t>(((i - 1) % n + n) % n)];
    int dst = net.sinks[static_cast<size_t>(((j - 1) % n + n) % n)];
    long long want_rot = alpha(j, n) - alpha(i, n);
    std::vector<CylPath> out;
    std::vector<int> stack;
    long long steps = 0;
    std::function<void(int, int)> dfs = [&](int u, int rot) {
        if (++steps > budget) fail("BUDGET_EXCEEDED", "path enumeration budget exhausted");
        if (u == dst && rot == want_rot) {
            CylPath p;
            p.from_index = i;
            p.to_index = j;
            p.edge_ids = stack;
            out.push_back(p);
        }
        for (size_t e = 0; e < net.edges.size(); ++e) {
            if (net.edges[e].from != u) continue;
            stack.push_back(static_cast<int>(e));
            dfs(net.edges[e].to, rot + net.edges[e].cross);
            stack.pop_back();
        }
    };
    dfs(src, 0);
    return out;
}

// c is a common vertex of p and q; the crossing is proper iff
// rot(p_{[c,*]}) - rot(q_{[c,*]}) = alpha(j) - alpha(j').
inline bool proper_crossing_test(const CylNetwork& net, const CylPath& p, const CylPath& q,
                                 int c) {
    if (!p.visits(net, c) || !q.visits(net, c))
        fail("BAD_INPUT", "crossing point is not on both paths");
    long long lhs = p.rot_after(net, c) - q.rot_after(net, c);
    long long rhs = alpha(p.to_index, net.n) - alpha(q.to_index, net.n);
    return lhs == rhs;
}

// uncrossed iff no common vertex is a proper crossing (the paths may still
// intersect)
inline bool is_uncrossed(const CylNetwork& net, const CylPath& p, const CylPath& q) {
    auto pv = p.vertex_ids(net);
    auto qv = q.vertex_ids(net);
    std::set<int> qs(qv.begin(), qv.end());
    for (int v : pv)
        if (qs.count(v) && proper_crossing_test(net, p, q, v)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// cylindric Lindstrom sum: Delta_{I,J}(X(N)) = sum over pairwise-uncrossed
// families {p_k an (i_k,j_k)-path} of the product of weights

inline Rat lindstrom_minor(const CylNetwork& net, const std::vector<long long>& I,
                           const std::vector<long long>& J, long long budget = 400000) {
    if (I.size() != J.size()) fail("BAD_INPUT", "lindstrom needs |I| = |J|");
    size_t K = I.size();
    std::vector<std::vector<CylPath>> paths(K);
    for (size_t k = 0; k < K; ++k) paths[k] = enumerate_ij_paths(net, I[k], J[k], budget);
    Rat total(0);
    std::vector<size_t> pickv(K, 0);
    long long count = 0;
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == K) {
            Rat w(1);
            for (size_t t = 0; t < K; ++t) w *= paths[t][pickv[t]].weight(net);
            total += w;
            return;
        }
        for (size_t c = 0; c < paths[k].size(); ++c) {
            if (++count > budget) fail("BUDGET_EXCEEDED", "family enumeration budget exhausted");
            bool ok = true;
            for (size_t t = 0; t < k && ok; ++t)
                ok = is_uncrossed(net, paths[t][pickv[t]], paths[k][c]);
            if (!ok) continue;
            pickv[k] = c;
            rec(k + 1);
        }
    };
    rec(0);
    return total;
}

// ---------------------------------------------------------------------------
// folded determinant via families: coefficient of t^k is
// (-1)^{k(n-1)} sum over vertex-disjoint families {p_i: v_i -> w_{i+k}} with
// k total net crossings.

inline LaurentPoly folded_det_families(const CylNetwork& net, int k_abs_max = -1,
                                       long long budget = 400000) {
    net.validate();
    int n = net.n;
    if (k_abs_max < 0) {
        k_abs_max = 0;
        for (const auto& e : net.edges) k_abs_max += std::abs(e.cross);
        k_abs_max = std::max(k_abs_max, 1);
    }
    LaurentPoly det;
    for (int k = -k_abs_max; k <= k_abs_max; ++k) {
        // families: p_i from v_i to the sink of class i+k, any rotors, no
        // shared vertices, total crossings k
        std::vector<std::vector<CylPath>> paths(n);
        bool feasible = true;
        for (int i = 1; i <= n && feasible; ++i) {
            int src = net.sources[i - 1];
            int dst = net.sinks[static_cast<size_t>(((i + k - 1) % n + n) % n)];
            std::vector<int> stack;
            long long steps = 0;
            std::function<void(int)> dfs = [&](int u) {
                if (++steps > budget) fail("BUDGET_EXCEEDED", "family budget exhausted");
                if (u == dst) {
                    CylPath p;
                    p.from_index = i;
                    p.to_index = i + k;
                    p.edge_ids = stack;
                    paths[i - 1].push_back(p);
                }
                for (size_t e = 0; e < net.edges.size(); ++e) {
                    if (net.edges[e].from != u) continue;
                    stack.push_back(static_cast<int>(e));
                    dfs(net.edges[e].to);
                    stack.pop_back();
                }
            };
            dfs(src);
            feasible = !paths[i - 1].empty();
        }
        if (!feasible) continue;
        Rat coef(0);
        std::vector<size_t> pickv(n, 0);
        std::function<void(int, int, std::set<int>&)> rec = [&](int i, int crossings,
                                                                std::set<int>& used) {
            if (i == n) {
                if (crossings == k) {
                    Rat w(1);
                    for (int t = 0; t < n; ++t) w *= paths[t][pickv[t]].weight(net);
                    coef += w;
                }
                return;
            }
            for (size_t c = 0; c < paths[i].size(); ++c) {
                const auto& p = paths[i][c];
                auto vs = p.vertex_ids(net);
                bool disjoint = true;
                for (int v : vs)
                    if (used.count(v)) { disjoint = false; break; }
                if (!disjoint) continue;
                for (int v : vs) used.insert(v);
                pickv[i] = c;
                rec(i + 1, crossings + p.rot(net), used);
                for (int v : vs) used.erase(v);
            }
        };
        std::set<int> used;
        rec(0, 0, used);
        if (coef != 0) {
            if ((static_cast<long long>(k) * (n - 1)) % 2 != 0) coef = -coef;
            det.coef[k] = coef;
        }
    }
    det.normalize();
    return det;
}

// ---------------------------------------------------------------------------
// building blocks and concatenation

namespace detail3 {

inline CylNetwork wires(int n, const std::vector<Rat>& weights) {
    CylNetwork net;
    net.n = n;
    for (int p = 1; p <= n; ++p) {
        net.vertices.push_back({p, p - 1});
        net.vertices.push_back({n + p, n + p - 1});
        net.sources.push_back(p);
        net.sinks.push_back(n + p);
        net.edges.push_back({p, n + p, weights[p - 1], 0});
    }
    return net;
}

} // namespace detail3

// kinds: "whirl" (diagonals a_i plus unit verticals), "e"/"f" (one Chevalley
// diagonal), "shift" and "downshift" (pure diagonals), "torus" (weighted
// verticals)
inline CylNetwork build_block(const std::string& kind, const std::vector<Rat>& params, int n,
                              int k = 0) {
    if (kind == "torus") {
        if (static_cast<int>(params.size()) != n) fail("BAD_INPUT", "torus block needs n weights");
        return detail3::wires(n, params);
    }
    std::vector<Rat> ones(n, Rat(1));
    CylNetwork net = detail3::wires(n, ones);
    if (kind == "whirl") {
        if (static_cast<int>(params.size()) != n) fail("BAD_INPUT", "whirl block needs n weights");
        for (int p = 1; p <= n; ++p) {
            int q = p % n + 1;
            net.edges.push_back({p, n + q, params[p - 1], p == n ? 1 : 0});
        }
        return net;
    }
    if (kind == "e") {
        if (params.size() != 1) fail("BAD_INPUT", "e block needs one weight");
        int p = ((k - 1) % n + n) % n + 1;
        int q = p % n + 1;
        net.edges.push_back({p, n + q, params[0], p == n ? 1 : 0});
        return net;
    }
    if (kind == "f") {
        if (params.size() != 1) fail("BAD_INPUT", "f block needs one weight");
        int p = ((k - 1) % n + n) % n + 1; // f_k: edge from source class k+1 to sink class k
        int from = p % n + 1;
        net.edges.push_back({from, n + p, params[0], p == n ? -1 : 0});
        return net;
    }
    if (kind == "shift" || kind == "downshift") {
        CylNetwork s;
        s.n = n;
        for (int p = 1; p <= n; ++p) {
            s.vertices.push_back({p, p - 1});
            s.vertices.push_back({n + p, n + p - 1});
            s.sources.push_back(p);
            s.sinks.push_back(n + p);
        }
        for (int p = 1; p <= n; ++p) {
            if (kind == "shift") {
                int q = p % n + 1;
                s.edges.push_back({p, n + q, Rat(1), p == n ? 1 : 0});
            } else {
                int q = (p - 2 + n) % n + 1;
                s.edges.push_back({p, n + q, Rat(1), p == 1 ? -1 : 0});
            }
        }
        return s;
    }
    fail("BAD_INPUT", "unknown block kind: " + kind);
}

// Stacks n1 below n2, identifying the sinks of n1 with the sources of n2, so
// that network_eval(concatenate(n1,n2)) = multiply(eval(n1), eval(n2)).
inline CylNetwork concatenate(const CylNetwork& n1, const CylNetwork& n2) {
    if (n1.n != n2.n) fail("BAD_INPUT", "boundary arity mismatch in concatenation");
    n1.validate();
    n2.validate();
    CylNetwork out;
    out.n = n1.n;
    long long h1max = 0;
    int idmax = 0;
    for (const auto& v : n1.vertices) {
        h1max = std::max(h1max, v.height);
        idmax = std::max(idmax, v.id);
    }
    long long h2min = n2.vertices.front().height;
    for (const auto& v : n2.vertices) h2min = std::min(h2min, v.height);
    long long hshift = h1max + 1 - h2min;
    int idshift = idmax + 1;
    out.vertices = n1.vertices;
    out.sources = n1.sources;
    // map n2 vertex ids: sources merge into n1 sinks, others are shifted
    std::map<int, int> remap;
    for (int t = 0; t < out.n; ++t) remap[n2.sources[t]] = n1.sinks[t];
    for (const auto& v : n2.vertices) {
        if (remap.count(v.id)) continue;
        remap[v.id] = v.id + idshift;
        out.vertices.push_back({v.id + idshift, v.height + hshift});
    }
    out.edges = n1.edges;
    for (const auto& e : n2.edges) out.edges.push_back({remap[e.from], remap[e.to], e.weight, e.cross});
    for (int t = 0; t < out.n; ++t) out.sinks.push_back(remap[n2.sinks[t]]);
    out.validate();
    return out;
}

// Cylindric network of a word over {whirl, e, f, shift, torus}.  Curl atoms
// are cyclic (the acyclic model cannot carry them); use curl_bounded_eval for
// the rotor-truncated approximation of a curl network.
inline CylNetwork network_from_word(const GeneratorWord& w) {
    CylNetwork acc;
    bool first = true;
    auto push = [&](const CylNetwork& blk) {
        acc = first ? blk : concatenate(acc, blk);
        first = false;
    };
    for (const auto& atom : w.atoms) {
        if (const auto* wa = std::get_if<WhirlAtom>(&atom))
            push(build_block("whirl", wa->params.v, w.n));
        else if (const auto* e = std::get_if<ChevE>(&atom))
            push(build_block("e", {e->a}, w.n, e->k));
        else if (const auto* f = std::get_if<ChevF>(&atom))
            push(build_block("f", {f->a}, w.n, f->k));
        else if (const auto* t = std::get_if<TorusAtom>(&atom))
            push(build_block("torus", t->d, w.n));
        else if (const auto* s = std::get_if<ShiftPow>(&atom)) {
            for (int r = 0; r < std::abs(s->k); ++r)
                push(build_block(s->k > 0 ? "shift" : "downshift", {}, w.n));
        } else {
            fail("UNSUPPORTED", "curl atoms are cyclic networks; excluded from exact evaluation");
        }
    }
    if (first) push(build_block("torus", std::vector<Rat>(w.n, Rat(1)), w.n));
    return acc;
}

// Bounded-rotor evaluation of the cyclic curl network: the entries of N(b)
// restricted to paths with rotor at most R.  This is the explicit truncation
// flag; the result is a window, not an exact matrix.
inline PeriodicBandMatrix curl_bounded_eval(const std::vector<Rat>& b, int max_rotor) {
    if (max_rotor < 0) fail("BAD_INPUT", "rotor bound must be nonnegative");
    return curl(b, static_cast<int>(b.size()) * max_rotor);
}

} // namespace cylnet
} // namespace looptnn
