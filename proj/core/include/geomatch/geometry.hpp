#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "geomatch/errors.hpp"

namespace geomatch {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double norm(Vec2 a);
double sqnorm(Vec2 a);

struct GridPoint {
    long long x = 0;
    long long y = 0;
    auto operator<=>(const GridPoint&) const = default;
};

enum class ShapeKind { Disk, Box, UnitDisk };

// Disk: center `a`, radius `r`. Box: corners `a` (low) and `b` (high).
// UnitDisk: a disk of radius exactly 1, kept as its own kind so callers can
// rely on the translate structure's precondition.
struct GeomObject {
    ShapeKind kind = ShapeKind::Disk;
    Vec2 a;
    Vec2 b;
    double r = 0.0;
};

GeomObject make_disk(double cx, double cy, double r);
GeomObject make_box(double x0, double y0, double x1, double y1);
GeomObject make_unit_disk(double cx, double cy);

inline bool is_disk_like(const GeomObject& o) { return o.kind != ShapeKind::Box; }

// Comparison policy: box comparisons are exact closed comparisons of the
// input coordinates; disk comparisons go through squared distances and use a
// relative slack of 1e-9 so tangency with representable inputs stays closed.
inline constexpr double kEpsRel = 1e-9;

bool intersects(const GeomObject& a, const GeomObject& b);
bool contains_point(const GeomObject& o, Vec2 p);
double diameter(const GeomObject& o);
Vec2 anchor(const GeomObject& o);

// Distance from point q to the nearest / farthest point of the object.
double min_dist(Vec2 q, const GeomObject& o);
double max_dist(Vec2 q, const GeomObject& o);

// Integer grid points contained in the closed object, lexicographically
// sorted by (x, y). Throws EmptyPiercing (with the given id) if none.
std::vector<GridPoint> pierce_points(const GeomObject& o, int object_id = -1);

// Points where the boundaries of the two objects cross, for candidate
// generation. May be empty; tangencies yield a single point.
std::vector<Vec2> boundary_intersections(const GeomObject& a, const GeomObject& b);

// Maximum number of objects covering a single point.  Evaluates candidate
// points only: object anchors, box corners, and pairwise boundary crossings
// (plus copies nudged inward along both normals).  Any deepest cell of the
// arrangement is a nonempty intersection of closed convex regions; it either
// contains a whole object (hence that object's anchor) or its boundary has a
// vertex where two object boundaries cross, so the candidate set realizes
// the maximum.
int depth(std::span<const GeomObject> objects);

// Lower-bound estimate of the density: max over probe disks X of the number
// of objects at least as large as X that intersect X.  Probes are centered
// at candidate points (anchors and pairwise boundary crossings, capped at a
// deterministic prefix) with radii from {0} and the half-diameters present
// in the family.  Monotone in the candidate set, so capping keeps it a valid
// lower bound.
double density_estimate(std::span<const GeomObject> objects);

struct InstanceParams {
    double psi = 1.0;
};

struct Instance {
    InstanceParams params;
    std::vector<GeomObject> objects;
};

// Checks the sparsifier's normalization: every object contains an
// axis-parallel unit square and fits in an axis-parallel square of side psi.
void validate_instance(const Instance& inst);

}  // namespace geomatch
