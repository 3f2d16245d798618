#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "geomatch/field_matrix.hpp"
#include "geomatch/geometry.hpp"
#include "geomatch/graph.hpp"
#include "geomatch/modular.hpp"
#include "geomatch/rng.hpp"
#include "geomatch/separator.hpp"
#include "geomatch/ztree.hpp"

namespace geomatch {

// Skew-symmetric matrix with fresh uniform nonzero entries per edge.
FieldMatrix tutte_matrix(const IntersectionGraph& g, const PrimeField& f, Rng& rng);

// Maximum matching size as rank(tutte)/2; fails with probability <= n^2/p.
int matching_size_estimate(const IntersectionGraph& g, uint64_t seed);

// Tree for A * A^T: vertex v is lifted to the topmost ancestor t of its own
// node with v adjacent to Z_t, so distance-2 edges still join
// ancestor-descendant pairs.
ZTree lift_tree_for_square(const IntersectionGraph& g, const ZTree& tree);

// Vertices covered by some maximum matching of g, found by eliminating the
// Gram matrix of a Tutte matrix with null rows deleted as they appear.
// Result is sorted and has even size.
std::vector<int> extract_matchable_subset(const IntersectionGraph& g, const ZTree& tree,
                                          const PrimeField& f, Rng& rng);

// Inverse block (A^{-1})[N x N] for a nonsingular Tutte matrix A of g,
// computed from a partial elimination of [[A A^T, E_N], [A_{N,*}, 0]] along
// the lifted tree; out[i][j] = (A^{-1})[nset[i]][nset[j]].
FieldMatrix corner_inverse(const FieldMatrix& a, const IntersectionGraph& g,
                           const ZTree& tree, const std::vector<int>& nset);

// Greedy filter of `cand` (pairs of indices into the block) keeping an edge
// when the current inverse says some perfect matching uses it, then updating
// the inverse in place to pin the edge.  Returns the kept pairs.
std::vector<std::pair<int, int>> maximal_allowed_submatching(
    FieldMatrix& inv, std::vector<std::pair<int, int>> cand);

struct AlgebraicOptions {
    SeparatorParams sep;
    int iteration_cap = 16;  // per tree node, inside one attempt
    int restarts = 3;
    bool keep_split = false;
};

struct AlgebraicDiagnostics {
    int attempts = 0;
    int split_count = 0;       // = matching-size inflation of the split graph
    int matchable_size = 0;    // |W|
    double rho_hat = 1.0;
    uint64_t prime = 0;
};

struct AlgebraicResult {
    Matching matching;
    AlgebraicDiagnostics diag;
    SeparatorTreeResult decomposition;  // populated when keep_split is set
};

// Full pipeline: build graph, split along a separator tree, extract the
// matchable subset, match it recursively by separator-local corner inverses,
// and undo the splits.  Each failed attempt reseeds the algebra; throws
// RetryExhausted after opts.restarts failures.
AlgebraicResult algebraic_maximum_matching(std::span<const GeomObject> objects,
                                           uint64_t seed, const AlgebraicOptions& opts);

// Same pipeline on a pre-built split graph and tree (shared across attempts).
Matching match_split_graph(const SplitGraph& split, const SeparatorTree& tree,
                           uint64_t seed, const AlgebraicOptions& opts,
                           AlgebraicDiagnostics* diag = nullptr);

}  // namespace geomatch
