#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "z2hc/errors.hpp"
#include "z2hc/graph.hpp"

namespace z2hc {

// A subset of edges as a bitmask; bit e set means edge e is in the subset.
using EdgeSubset = std::uint64_t;

inline EdgeSubset edge_bit(int e) { return EdgeSubset{1} << e; }

// Per-vertex masks of incident edges.
inline std::vector<EdgeSubset> vertex_incidence_masks(const Graph& g) {
    if (g.n_edges() > 64) throw resource_error("edge masks support at most 64 edges");
    std::vector<EdgeSubset> inc(g.n_vertices(), 0);
    for (int e = 0; e < g.n_edges(); ++e) {
        inc[g.edge(e).first] |= edge_bit(e);
        inc[g.edge(e).second] |= edge_bit(e);
    }
    return inc;
}

// An edge subset is a closed-string configuration when every vertex meets an
// even number of its edges. These are exactly the cycle-space members.
inline bool is_closed_string_config(EdgeSubset mask, const std::vector<EdgeSubset>& inc) {
    for (EdgeSubset m : inc)
        if (std::popcount(mask & m) & 1) return false;
    return true;
}

inline bool is_closed_string_config(const Graph& g, EdgeSubset mask) {
    return is_closed_string_config(mask, vertex_incidence_masks(g));
}

// Hamiltonian cycle test: n_vertices edges, every vertex meets exactly two of
// them, and walking the subgraph closes a single loop through all vertices.
inline bool is_hamiltonian_cycle_config(const Graph& g, EdgeSubset mask,
                                        const std::vector<EdgeSubset>& inc) {
    int n = g.n_vertices();
    if (n < 3) return false;
    if (std::popcount(mask) != n) return false;
    for (int v = 0; v < n; ++v)
        if (std::popcount(mask & inc[v]) != 2) return false;
    // Degrees all 2 and |mask| == n: a disjoint union of loops covering every
    // vertex. Single loop iff the walk from vertex 0 returns after n steps.
    int at = 0;
    int prev_edge = -1;
    for (int step = 0; step < n; ++step) {
        EdgeSubset here = mask & inc[at];
        if (prev_edge >= 0) here &= ~edge_bit(prev_edge);
        int e = std::countr_zero(here);
        auto [u, v] = g.edge(e);
        at = (u == at) ? v : u;
        prev_edge = e;
        if (at == 0) return step == n - 1;
    }
    return false;
}

inline bool is_hamiltonian_cycle_config(const Graph& g, EdgeSubset mask) {
    return is_hamiltonian_cycle_config(g, mask, vertex_incidence_masks(g));
}

// Cycle space of a connected graph over GF(2), spanned by the fundamental
// cycles of a BFS spanning tree rooted at vertex 0. Tree exploration follows
// adjacency order, which follows edge index order, so the basis is a pure
// function of the graph text.
class CycleSpaceBasis {
public:
    explicit CycleSpaceBasis(const Graph& g) {
        if (g.n_edges() > 64) throw resource_error("cycle space supports at most 64 edges");
        if (!g.is_connected()) throw invalid_argument("cycle space basis needs a connected graph");
        int n = g.n_vertices();
        std::vector<EdgeSubset> path(n, 0);
        std::vector<char> seen(n, 0);
        std::vector<char> tree_edge(g.n_edges(), 0);
        std::vector<int> queue = {0};
        seen[0] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            for (auto [w, e] : g.neighbors(v)) {
                if (seen[w]) continue;
                seen[w] = 1;
                tree_edge[e] = 1;
                path[w] = path[v] ^ edge_bit(e);
                queue.push_back(w);
            }
        }
        for (int e = 0; e < g.n_edges(); ++e) {
            if (tree_edge[e]) continue;
            auto [u, v] = g.edge(e);
            cycles_.push_back(path[u] ^ path[v] ^ edge_bit(e));
            chord_bits_.push_back(edge_bit(e));
        }
    }

    int dimension() const { return static_cast<int>(cycles_.size()); }
    const std::vector<EdgeSubset>& cycles() const { return cycles_; }

    // Each basis cycle is the only one containing its chord, so membership
    // reduces to cancelling chord bits and checking nothing remains.
    bool contains(EdgeSubset mask) const {
        for (std::size_t i = 0; i < cycles_.size(); ++i)
            if (mask & chord_bits_[i]) mask ^= cycles_[i];
        return mask == 0;
    }

private:
    std::vector<EdgeSubset> cycles_;
    std::vector<EdgeSubset> chord_bits_;
};

// Number of closed-string configurations: 2^(cycle space dimension).
inline std::uint64_t closed_string_count(const Graph& g) {
    CycleSpaceBasis basis(g);
    return std::uint64_t{1} << basis.dimension();
}

// Exact count of undirected Hamiltonian cycles by backtracking over simple
// paths from vertex 0. Each cycle is counted once: closure is only accepted
// when the first step is the smaller-numbered of the two cycle neighbors of
// vertex 0. Prunes branches that strand a vertex with fewer than two usable
// neighbors.
inline std::uint64_t count_hamiltonian_cycles(const Graph& g) {
    int n = g.n_vertices();
    if (n < 3) return 0;
    if (n > 24) throw resource_error("backtracking counter capped at 24 vertices");

    std::vector<std::uint32_t> adj(n, 0);
    for (auto [u, v] : g.edges()) {
        adj[u] |= std::uint32_t{1} << v;
        adj[v] |= std::uint32_t{1} << u;
    }
    std::uint32_t full = (n == 32) ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;

    std::uint64_t count = 0;
    // dfs over (current endpoint, visited set); `first` pins the orientation.
    auto dfs = [&](auto&& self, int last, int first, std::uint32_t visited) -> void {
        if (visited == full) {
            if ((adj[last] >> 0 & 1) && first < last) ++count;
            return;
        }
        std::uint32_t open = full & ~visited;
        std::uint32_t reach = open | (std::uint32_t{1} << last) | 1u;
        for (std::uint32_t rest = open; rest; rest &= rest - 1) {
            int u = std::countr_zero(rest);
            if (std::popcount(adj[u] & reach) < 2) return;
        }
        for (std::uint32_t cand = adj[last] & open; cand; cand &= cand - 1) {
            int v = std::countr_zero(cand);
            self(self, v, first, visited | (std::uint32_t{1} << v));
        }
    };
    for (std::uint32_t cand = adj[0]; cand; cand &= cand - 1) {
        int v = std::countr_zero(cand);
        dfs(dfs, v, v, 1u | (std::uint32_t{1} << v));
    }
    return count;
}

// Same count via subset dynamic programming (number of directed Hamiltonian
// cycles through vertex 0, halved). Independent of the backtracking logic.
inline std::uint64_t count_hamiltonian_cycles_dp(const Graph& g) {
    int n = g.n_vertices();
    if (n < 3) return 0;
    if (n > 20) throw resource_error("subset DP counter capped at 20 vertices");

    int m = n - 1; // vertices 1..n-1 tracked in subsets
    std::vector<std::uint32_t> adj(n, 0);
    for (auto [u, v] : g.edges()) {
        adj[u] |= std::uint32_t{1} << v;
        adj[v] |= std::uint32_t{1} << u;
    }
    std::size_t n_sets = std::size_t{1} << m;
    // dp[S * m + (v-1)]: simple paths 0 -> v visiting exactly S (subset of 1..n-1).
    std::vector<std::uint64_t> dp(n_sets * m, 0);
    for (int v = 1; v < n; ++v)
        if (adj[0] >> v & 1) dp[(std::size_t{1} << (v - 1)) * m + (v - 1)] = 1;
    for (std::uint32_t s = 1; s < n_sets; ++s) {
        for (std::uint32_t vs = s; vs; vs &= vs - 1) {
            int vi = std::countr_zero(vs);
            std::uint64_t paths = dp[std::size_t{s} * m + vi];
            if (!paths) continue;
            std::uint32_t ext = adj[vi + 1] >> 1 & ~s & (n_sets - 1);
            for (std::uint32_t ws = ext; ws; ws &= ws - 1) {
                int wi = std::countr_zero(ws);
                dp[(std::size_t{s} | (std::uint32_t{1} << wi)) * m + wi] += paths;
            }
        }
    }
    std::uint64_t directed = 0;
    for (int v = 1; v < n; ++v)
        if (adj[v] & 1u) directed += dp[(n_sets - 1) * m + (v - 1)];
    return directed / 2;
}

// Same count a third way: enumerate the whole cycle space in Gray-code order
// and test each member. Exercises the basis and the membership predicate.
inline std::uint64_t count_hc_via_cycle_space(const Graph& g) {
    CycleSpaceBasis basis(g);
    if (basis.dimension() > 26) throw resource_error("cycle space enumeration capped at 2^26");
    auto inc = vertex_incidence_masks(g);
    std::uint64_t total = std::uint64_t{1} << basis.dimension();
    EdgeSubset mask = 0;
    std::uint64_t count = 0;
    int n = g.n_vertices();
    for (std::uint64_t k = 1; k < total; ++k) {
        mask ^= basis.cycles()[std::countr_zero(k)];
        if (std::popcount(mask) == n && is_hamiltonian_cycle_config(g, mask, inc)) ++count;
    }
    return count;
}

} // namespace z2hc
