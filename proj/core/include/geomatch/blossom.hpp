#pragma once

#include "geomatch/graph.hpp"

namespace geomatch {

// Deterministic maximum matching by augmenting paths with blossom
// contraction; cubic in the number of vertices.  Serves as the exact oracle
// for every randomized result in this library.
Matching blossom_maximum_matching(const IntersectionGraph& g);

// Exhaustive maximum matching size over all vertex subsets; throws TooLarge
// for more than 16 vertices.  Used to validate the blossom oracle itself.
int exhaustive_matching_size(const IntersectionGraph& g);

}  // namespace geomatch
