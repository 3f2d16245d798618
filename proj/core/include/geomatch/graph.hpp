#pragma once

#include <span>
#include <string>
#include <vector>

#include "geomatch/geometry.hpp"

namespace geomatch {

// Undirected graph with sorted adjacency lists.  `origin[v]` tracks the
// vertex of the graph this one was derived from (identity for freshly built
// graphs).
struct IntersectionGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    std::size_t edge_count = 0;
    std::vector<int> origin;

    bool has_edge(int u, int v) const;
};

IntersectionGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges);

// Intersection graph of the objects; vertex i is objects[i].  Candidate
// pairs come from a hierarchical grid bucketed by diameter so the work stays
// near-linear for bounded density; each candidate is confirmed with the
// exact predicate.
IntersectionGraph build_graph(std::span<const GeomObject> objects);

struct SubgraphResult {
    IntersectionGraph graph;
    std::vector<int> to_parent;  // new vertex -> old vertex
};
SubgraphResult induced_subgraph(const IntersectionGraph& g, std::span<const int> keep);

// Keeps only edges whose endpoints carry different labels.
IntersectionGraph bipartite_restrict(const IntersectionGraph& g,
                                     std::span<const int> side_labels);

// Plain text edge list, one "u v" per line, 0-based.
std::string export_edge_list(const IntersectionGraph& g);
IntersectionGraph import_edge_list(const std::string& text, int n);

struct Matching {
    std::vector<std::pair<int, int>> pairs;
    std::size_t size() const { return pairs.size(); }
};

// Throws InvalidMatching unless every pair is an edge of g and no vertex
// repeats.
void validate_matching(const IntersectionGraph& g, const Matching& m);

}  // namespace geomatch
