#pragma once

#include <vector>

namespace geomatch {

// Binary tree whose nodes carry disjoint vertex sets ("z-sets").  V_t is the
// union of z-sets in the subtree rooted at t.  Produced by the separator
// construction and consumed by the elimination schedule.
struct ZTree {
    struct Node {
        std::vector<int> z;
        int left = -1;
        int right = -1;
        int parent = -1;
    };
    std::vector<Node> nodes;
    int root = -1;

    bool is_leaf(int t) const { return nodes[t].left < 0 && nodes[t].right < 0; }
};

// Vertices in post order (left subtree, right subtree, own z-set); the
// returned vector maps row position to vertex id.  Rows of each z-set are
// consecutive and descendants precede ancestors.
std::vector<int> post_order_permutation(const ZTree& tree);

// node_of[v] = tree node whose z-set contains v (-1 if none).
std::vector<int> node_assignment(const ZTree& tree, int n);

}  // namespace geomatch
