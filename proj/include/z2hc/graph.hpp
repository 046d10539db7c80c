#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "z2hc/errors.hpp"
#include "z2hc/rng.hpp"

namespace z2hc {

// FNV-1a 64-bit over a byte string. Used for content digests of graphs and
// schedules; stable across platforms because the canonical text is.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

// Simple undirected graph. Vertices are 0..n_vertices-1; edges carry the index
// they were given in (edge index == qubit index everywhere downstream).
// Endpoints are normalized to u < v; edge order is preserved.
class Graph {
public:
    Graph(int n_vertices, std::vector<std::pair<int, int>> edges)
        : n_v_(n_vertices), edges_(std::move(edges)) {
        if (n_v_ < 1) throw invalid_argument("graph needs at least one vertex");
        for (auto& [u, v] : edges_) {
            if (u < 0 || u >= n_v_ || v < 0 || v >= n_v_)
                throw invalid_argument("edge endpoint out of range: " + std::to_string(u) + " " +
                                       std::to_string(v));
            if (u == v) throw invalid_argument("self-loop at vertex " + std::to_string(u));
            if (u > v) std::swap(u, v);
        }
        for (std::size_t i = 0; i < edges_.size(); ++i)
            for (std::size_t j = i + 1; j < edges_.size(); ++j)
                if (edges_[i] == edges_[j])
                    throw invalid_argument("duplicate edge " + std::to_string(edges_[i].first) +
                                           " " + std::to_string(edges_[i].second));
        adj_.assign(n_v_, {});
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            adj_[edges_[e].first].push_back({edges_[e].second, static_cast<int>(e)});
            adj_[edges_[e].second].push_back({edges_[e].first, static_cast<int>(e)});
        }
    }

    int n_vertices() const { return n_v_; }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    std::pair<int, int> edge(int e) const { return edges_[e]; }

    // Neighbors of v as (other endpoint, edge index), in edge-index order of
    // appearance. Deterministic, which downstream traversals rely on.
    const std::vector<std::pair<int, int>>& neighbors(int v) const { return adj_[v]; }

    int degree(int v) const { return static_cast<int>(adj_[v].size()); }

    bool is_connected() const {
        if (n_v_ == 1) return true;
        std::vector<char> seen(n_v_, 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [w, e] : adj_[v]) {
                (void)e;
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == n_v_;
    }

private:
    int n_v_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
};

struct DegreeStats {
    int min_deg = 0;
    int max_deg = 0;
    double mean_deg = 0.0;
    std::vector<int> degrees; // per vertex
};

inline DegreeStats degree_stats(const Graph& g) {
    DegreeStats s;
    s.min_deg = g.n_vertices();
    s.degrees.reserve(g.n_vertices());
    for (int v = 0; v < g.n_vertices(); ++v) {
        int d = g.degree(v);
        s.degrees.push_back(d);
        s.min_deg = std::min(s.min_deg, d);
        s.max_deg = std::max(s.max_deg, d);
        s.mean_deg += d;
    }
    s.mean_deg /= g.n_vertices();
    return s;
}

// Canonical text form: header line "<n_vertices> <n_edges>", then one
// "u v" line per edge in index order. This is both the file format and the
// digest preimage.
inline std::string format_graph(const Graph& g) {
    std::ostringstream out;
    out << g.n_vertices() << ' ' << g.n_edges() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

inline std::string graph_digest(const Graph& g) { return hex16(fnv1a64(format_graph(g))); }

// Parses the text form. Lines that are blank or start with '#' are skipped.
// Errors carry 1-based line numbers.
inline Graph parse_graph(std::istream& in) {
    long line_no = 0;
    std::string line;
    auto next_payload = [&](std::string& out) -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            std::size_t i = line.find_first_not_of(" \t\r");
            if (i == std::string::npos) continue;
            if (line[i] == '#') continue;
            out = line;
            return true;
        }
        return false;
    };

    std::string payload;
    if (!next_payload(payload)) throw parse_error("empty graph input");
    long header_line = line_no;
    std::istringstream hs(payload);
    long long n_v = 0, n_e = 0;
    std::string junk;
    if (!(hs >> n_v >> n_e) || (hs >> junk))
        throw parse_error("expected header '<n_vertices> <n_edges>'", header_line);
    if (n_v < 1 || n_e < 0 || n_v > 1000000 || n_e > 1000000)
        throw parse_error("implausible header counts", header_line);

    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n_e));
    for (long long i = 0; i < n_e; ++i) {
        if (!next_payload(payload))
            throw parse_error("expected " + std::to_string(n_e) + " edges, found " +
                                  std::to_string(i),
                              line_no);
        std::istringstream es(payload);
        long long u = 0, v = 0;
        if (!(es >> u >> v) || (es >> junk)) throw parse_error("expected edge 'u v'", line_no);
        edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    }
    if (next_payload(payload)) throw parse_error("trailing content after last edge", line_no);

    try {
        return Graph(static_cast<int>(n_v), std::move(edges));
    } catch (const invalid_argument& e) {
        throw parse_error(e.what());
    }
}

inline Graph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

// rows x cols periodic square lattice. Both dimensions need >= 3 or the
// wrap-around edges collapse into duplicates. Edge order: all horizontal
// edges row-major, then all vertical edges row-major; vertex (r,c) = r*cols+c.
inline Graph torus_graph(int rows, int cols) {
    if (rows < 3 || cols < 3) throw invalid_argument("torus needs rows, cols >= 3");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(2 * rows * cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) edges.push_back({r * cols + c, r * cols + (c + 1) % cols});
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) edges.push_back({r * cols + c, ((r + 1) % rows) * cols + c});
    return Graph(rows * cols, std::move(edges));
}

// Uniform random connected simple graph with the given vertex and edge counts:
// a uniform labeled spanning tree (random Pruefer sequence), then extra
// distinct non-tree edges sampled uniformly. Edge order is shuffled so tree
// edges hold no privileged qubit positions.
inline Graph random_connected_graph(int n_v, int n_e, Rng& rng) {
    if (n_v < 1) throw invalid_argument("need at least one vertex");
    long long max_e = static_cast<long long>(n_v) * (n_v - 1) / 2;
    if (n_e < n_v - 1 || n_e > max_e)
        throw invalid_argument("edge count " + std::to_string(n_e) +
                               " out of range for connected simple graph on " +
                               std::to_string(n_v) + " vertices");

    std::vector<std::pair<int, int>> edges;
    if (n_v == 1) return Graph(1, {});
    if (n_v == 2) {
        edges.push_back({0, 1});
        return Graph(2, std::move(edges));
    }

    std::vector<int> pruefer(n_v - 2);
    for (auto& p : pruefer) p = static_cast<int>(rng.next_below(n_v));
    std::vector<int> deg(n_v, 1);
    for (int p : pruefer) ++deg[p];
    // Decode: repeatedly join the smallest leaf to the next sequence entry.
    std::vector<char> used(n_v, 0);
    int leaf = 0;
    while (deg[leaf] != 1) ++leaf;
    int low = leaf;
    for (int p : pruefer) {
        edges.push_back({leaf, p});
        if (--deg[p] == 1 && p < low) {
            leaf = p;
        } else {
            ++low;
            while (deg[low] != 1) ++low;
            leaf = low;
        }
    }
    edges.push_back({leaf, n_v - 1});
    for (auto& [u, v] : edges)
        if (u > v) std::swap(u, v);

    std::vector<char> present(static_cast<std::size_t>(n_v) * n_v, 0);
    for (auto& [u, v] : edges) present[static_cast<std::size_t>(u) * n_v + v] = 1;
    while (static_cast<int>(edges.size()) < n_e) {
        int u = static_cast<int>(rng.next_below(n_v));
        int v = static_cast<int>(rng.next_below(n_v));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (present[static_cast<std::size_t>(u) * n_v + v]) continue;
        present[static_cast<std::size_t>(u) * n_v + v] = 1;
        edges.push_back({u, v});
    }

    for (std::size_t i = edges.size(); i > 1; --i)
        std::swap(edges[i - 1], edges[rng.next_below(i)]);
    return Graph(n_v, std::move(edges));
}

inline Graph random_connected_graph(int n_v, int n_e, std::uint64_t seed) {
    Rng rng(seed);
    return random_connected_graph(n_v, n_e, rng);
}

} // namespace z2hc
