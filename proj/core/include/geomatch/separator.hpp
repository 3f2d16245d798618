#pragma once

#include <span>
#include <vector>

#include "geomatch/geometry.hpp"
#include "geomatch/graph.hpp"
#include "geomatch/rng.hpp"
#include "geomatch/ztree.hpp"

namespace geomatch {

struct Circle {
    Vec2 center;
    double r = 0.0;
};

// Disjoint X, Y, Z with no X-Y edge.
struct Separation {
    std::vector<int> x, y, z;
};

struct SeparatorParams {
    double c = 4.0;          // |Z| <= c * sqrt(rho_hat * n)
    double alpha = 0.96;     // |X u Z|, |Y u Z| <= alpha * n
    int leaf_cap_factor = 8; // recursion stops at max(factor * rho_hat, min_leaf_cap)
    int min_leaf_cap = 64;
    int max_retries = 200;
    int candidate_centers = 16;
};

struct CircleSeparatorResult {
    Circle circle;
    Separation sep;
    int retries = 0;  // rejected attempts before acceptance
};

// Random separating circle: candidate centers are sampled anchors, the base
// radius is the distance to the ceil(n/20)-th nearest other anchor
// (minimized over candidates), scaled uniformly from [1,2].  Objects caught
// or touched by the circle form Z; the fully-inside and fully-outside sets
// cannot intersect each other.  Retries until the size and balance bounds
// hold; throws SeparatorNotFound when the retry budget is exhausted, which
// signals a mis-set c or alpha for the instance class.
CircleSeparatorResult circle_separator(std::span<const GeomObject> objects,
                                       double rho_hat, const SeparatorParams& params,
                                       Rng& rng);

// One vertex split: new path v - v' - v'', with the edges to `moved`
// rerouted from v to v''.  Increases the maximum matching size by exactly 1.
struct SplitEvent {
    int anchor = -1;
    int vprime = -1;
    int vdouble = -1;
    std::vector<int> moved;
};

// G' = base graph after a sequence of vertex splits; vertex v carries
// objects[v] (gadget vertices carry a copy of their parent's object).
struct SplitGraph {
    IntersectionGraph graph;
    std::vector<GeomObject> objects;
    std::vector<SplitEvent> splits;
    int original_n = 0;
};

// Splits the vertices of sep.z so that the separator becomes a set z_star of
// degree <= 3 gadget vertices, each side keeps a copy of every z-vertex, and
// both sides induce the original side-plus-z graph with the inner z edges
// removed.  |z_star| = |z| + 4 |E(G[z])|.
struct SeparatorSplitResult {
    SplitGraph split;
    std::vector<int> z_star;
    std::vector<int> x_star, y_star;
};
SeparatorSplitResult split_separator_vertices(const IntersectionGraph& g,
                                              const std::vector<GeomObject>& objects,
                                              const Separation& sep);

struct TreeParams {
    double gamma = 0.0;  // achieved max |Z_t| / sqrt(|V_t|) over internal nodes
    double beta = 0.5;
    double alpha = 0.96;
    int leaf_cap = 64;          // recursion threshold on the pre-split set
    int leaf_size_bound = 64;   // achieved max leaf z-set size after splits
    double rho_hat = 1.0;
};

struct SeparatorStats {
    struct Sep {
        int n = 0;       // subproblem size when the separator was accepted
        int z = 0;
        int xz = 0, yz = 0;
        int retries = 0;
        double rho = 1.0;
    };
    std::vector<Sep> seps;
};

struct SeparatorTree {
    ZTree tree;
    TreeParams params;
    SeparatorStats stats;
};

struct SeparatorTreeResult {
    SplitGraph split;
    SeparatorTree tree;
};

// Builds the split graph G' (max degree <= 4) and a separator tree whose
// z-sets partition V(G'), with every edge joining an ancestor-descendant
// pair of nodes and every internal separator alpha-balanced (pendant-path
// padding is applied at a node's own z-set when splits skew the balance).
SeparatorTreeResult build_separator_tree(std::span<const GeomObject> objects,
                                         const SeparatorParams& params, Rng& rng);

// Reverses the recorded splits on a matching of G'.  When `m` is a maximum
// matching of G', the result is a maximum matching of the base graph with
// exactly splits.size() fewer edges.
Matching unsplit_matching(const Matching& m, const SplitGraph& split,
                          const IntersectionGraph& base);

// Structural checks: z-sets partition the vertices, every edge joins an
// ancestor-descendant pair, children respect the recorded balance, z-sets
// respect the recorded gamma, leaves respect the recorded size bound, and
// the degree caps hold (4 overall, 3 on internal z-sets).  Throws Error with
// a description of the first violation.
void validate_tree(const IntersectionGraph& g, const SeparatorTree& t);

}  // namespace geomatch
