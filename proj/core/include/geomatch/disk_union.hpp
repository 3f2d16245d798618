#pragma once

#include <span>
#include <vector>

#include "geomatch/geometry.hpp"

namespace geomatch {

// Boundary of a union of disks that all strictly contain a common point q.
// Such a union is star-shaped around q, so its boundary is a cyclic sequence
// of circular arcs indexed by the angle seen from q.  arcs[t] owns the
// angular range [arcs[t].start, arcs[t+1].start), wrapping at the end; disk
// values index the caller's disk array.
struct StarArc {
    double start;
    int disk;
};

struct StarUnion {
    Vec2 q;
    std::vector<StarArc> arcs;
};

// Distance from q along direction theta to the exit through the boundary of
// the disk (c, r); q must be strictly inside.
double ray_exit(Vec2 q, Vec2 c, double r, double theta);

// Envelope of two unions around the same q.  Within an angular sector the
// owners can swap only where their circles cross, so sectors are cut at
// those angles and decided by midpoint comparison.
StarUnion merge_unions(const StarUnion& a, const StarUnion& b,
                       std::span<const GeomObject> disks);

// Union boundary of disks[first..last] by divide and conquer merging; every
// disk must strictly contain q (PointNotInterior otherwise).  Only disk-like
// objects are allowed.
StarUnion union_pierced(std::span<const GeomObject> disks, Vec2 q);

// Membership by angular binary search plus one radial comparison.
bool union_contains(const StarUnion& u, std::span<const GeomObject> disks, Vec2 x);

}  // namespace geomatch
