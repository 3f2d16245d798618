#include "geomatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace geomatch {

bool IntersectionGraph::has_edge(int u, int v) const {
    const auto& a = adj[static_cast<std::size_t>(u)];
    return std::binary_search(a.begin(), a.end(), v);
}

namespace {

void finalize(IntersectionGraph& g) {
    g.edge_count = 0;
    for (auto& a : g.adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        g.edge_count += a.size();
    }
    g.edge_count /= 2;
    if (g.origin.empty()) {
        g.origin.resize(static_cast<std::size_t>(g.n));
        for (int v = 0; v < g.n; ++v) g.origin[static_cast<std::size_t>(v)] = v;
    }
}

struct CellHash {
    std::size_t operator()(const std::pair<long long, long long>& c) const {
        return std::hash<long long>{}(c.first * 1000003LL + c.second);
    }
};

}  // namespace

IntersectionGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
    IntersectionGraph g;
    g.n = n;
    g.adj.resize(static_cast<std::size_t>(n));
    for (const auto& [u, v] : edges) {
        if (u == v) continue;
        g.adj[static_cast<std::size_t>(u)].push_back(v);
        g.adj[static_cast<std::size_t>(v)].push_back(u);
    }
    finalize(g);
    return g;
}

IntersectionGraph build_graph(std::span<const GeomObject> objects) {
    const int n = static_cast<int>(objects.size());
    IntersectionGraph g;
    g.n = n;
    g.adj.resize(objects.size());

    // Level of an object: smallest l with diameter <= 2^l, so any object at
    // level l stays within distance 2^(l-1) of its anchor.  Two intersecting
    // objects at levels a <= b have anchors within 2^(a-1) + 2^(b-1) <= 2^b,
    // hence land in 3x3 neighboring cells of the level-b grid.
    const auto level_of = [](const GeomObject& o) {
        const double d = std::max(diameter(o), 1e-9);
        return static_cast<int>(std::ceil(std::log2(d)));
    };
    std::vector<int> level(objects.size());
    int max_level = -1000;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        level[i] = level_of(objects[i]);
        max_level = std::max(max_level, level[i]);
    }

    using Cell = std::pair<long long, long long>;
    std::unordered_map<int, std::unordered_map<Cell, std::vector<int>, CellHash>> grids;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const Vec2 c = anchor(objects[i]);
        const double side = std::ldexp(1.0, level[i]);
        grids[level[i]][{static_cast<long long>(std::floor(c.x / side)),
                         static_cast<long long>(std::floor(c.y / side))}]
            .push_back(static_cast<int>(i));
    }

    for (std::size_t i = 0; i < objects.size(); ++i) {
        const Vec2 c = anchor(objects[i]);
        for (auto& [lvl, grid] : grids) {
            if (lvl < level[i]) continue;
            const double side = std::ldexp(1.0, lvl);
            const long long cx = static_cast<long long>(std::floor(c.x / side));
            const long long cy = static_cast<long long>(std::floor(c.y / side));
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy) {
                    const auto it = grid.find({cx + dx, cy + dy});
                    if (it == grid.end()) continue;
                    for (const int j : it->second) {
                        if (lvl == level[i] && j <= static_cast<int>(i)) continue;
                        if (intersects(objects[i], objects[static_cast<std::size_t>(j)])) {
                            g.adj[i].push_back(j);
                            g.adj[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
                        }
                    }
                }
        }
    }
    finalize(g);
    return g;
}

SubgraphResult induced_subgraph(const IntersectionGraph& g, std::span<const int> keep) {
    SubgraphResult out;
    std::vector<int> local(static_cast<std::size_t>(g.n), -1);
    out.to_parent.assign(keep.begin(), keep.end());
    std::sort(out.to_parent.begin(), out.to_parent.end());
    for (std::size_t i = 0; i < out.to_parent.size(); ++i)
        local[static_cast<std::size_t>(out.to_parent[i])] = static_cast<int>(i);
    out.graph.n = static_cast<int>(out.to_parent.size());
    out.graph.adj.resize(out.to_parent.size());
    for (std::size_t i = 0; i < out.to_parent.size(); ++i) {
        for (const int w : g.adj[static_cast<std::size_t>(out.to_parent[i])])
            if (local[static_cast<std::size_t>(w)] >= 0)
                out.graph.adj[i].push_back(local[static_cast<std::size_t>(w)]);
    }
    out.graph.origin.resize(out.to_parent.size());
    for (std::size_t i = 0; i < out.to_parent.size(); ++i)
        out.graph.origin[i] = g.origin[static_cast<std::size_t>(out.to_parent[i])];
    finalize(out.graph);
    return out;
}

IntersectionGraph bipartite_restrict(const IntersectionGraph& g,
                                     std::span<const int> side_labels) {
    IntersectionGraph out;
    out.n = g.n;
    out.adj.resize(static_cast<std::size_t>(g.n));
    out.origin = g.origin;
    for (int u = 0; u < g.n; ++u)
        for (const int v : g.adj[static_cast<std::size_t>(u)])
            if (u < v && side_labels[static_cast<std::size_t>(u)] !=
                             side_labels[static_cast<std::size_t>(v)]) {
                out.adj[static_cast<std::size_t>(u)].push_back(v);
                out.adj[static_cast<std::size_t>(v)].push_back(u);
            }
    finalize(out);
    return out;
}

std::string export_edge_list(const IntersectionGraph& g) {
    std::ostringstream os;
    for (int u = 0; u < g.n; ++u)
        for (const int v : g.adj[static_cast<std::size_t>(u)])
            if (u < v) os << u << ' ' << v << '\n';
    return os.str();
}

IntersectionGraph import_edge_list(const std::string& text, int n) {
    std::istringstream is(text);
    std::vector<std::pair<int, int>> edges;
    int u, v;
    while (is >> u >> v) edges.emplace_back(u, v);
    return make_graph(n, edges);
}

void validate_matching(const IntersectionGraph& g, const Matching& m) {
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    for (const auto& [u, v] : m.pairs) {
        if (u < 0 || v < 0 || u >= g.n || v >= g.n || !g.has_edge(u, v))
            throw InvalidMatching("pair is not an edge: " + std::to_string(u) + "," +
                                  std::to_string(v));
        if (seen[static_cast<std::size_t>(u)] || seen[static_cast<std::size_t>(v)])
            throw InvalidMatching("vertex matched twice");
        seen[static_cast<std::size_t>(u)] = seen[static_cast<std::size_t>(v)] = 1;
    }
}

}  // namespace geomatch
