#pragma once

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "geomatch/geometry.hpp"
#include "geomatch/graph.hpp"

namespace geomatch {

// Objects keyed by the lexicographically smallest grid point they contain.
struct ClusterMap {
    std::map<GridPoint, std::vector<int>> clusters;  // member ids, ascending
};

ClusterMap assign_clusters(std::span<const GeomObject> objects);

// Occupied grid points with edges between pairs at L-infinity distance
// <= 2 psi.  Any two intersecting objects live in clusters that are either
// equal or adjacent here.
struct PatternGraph {
    std::vector<GridPoint> points;
    std::vector<std::vector<int>> adj;
    int lambda = 0;  // realized maximum degree
};

PatternGraph build_pattern_graph(const ClusterMap& cm, double psi);

// Deletion-capable intersection queries against one cluster's members.
// query returns the smallest live member id intersecting u (or -1); erase
// removes one member until rollback restores the full set.  Callers follow
// the query-then-erase-the-result pattern; the unit-disk implementation is
// tuned for it but stays correct for any erase order.
class ClusterQueryStructure {
  public:
    virtual ~ClusterQueryStructure() = default;
    virtual int query(const GeomObject& u) = 0;
    virtual void erase(int id) = 0;
    virtual void rollback() = 0;
};

enum class StructureKind { Naive, UnitDisk };

// Naive: linear scan, any shapes.  UnitDisk: canonical-subset tree over
// star-shaped unions of the radius-2 Minkowski disks (members must be unit
// disks, all pierced by p; throws BadInstance otherwise).
std::unique_ptr<ClusterQueryStructure> make_query_structure(
    StructureKind kind, std::span<const GeomObject> objects,
    const std::vector<int>& members, GridPoint p);

// One pattern edge: a cross-cluster matching of up to 2*lambda+1 edges by
// query/erase; if it tops out, its endpoints suffice, otherwise each
// endpoint also pulls up to lambda cross-neighbors (with rollbacks in
// between).  Returns the selected object ids, sorted.
std::vector<int> sparsify_one_edge(std::span<const GeomObject> objects,
                                   const std::vector<int>& up,
                                   const std::vector<int>& uq, int lambda,
                                   ClusterQueryStructure& qs_p,
                                   ClusterQueryStructure& qs_q);

struct SparsifierResult {
    std::vector<int> kept;  // W, sorted object ids
    std::map<GridPoint, std::vector<int>> residuals;  // even-sized leftovers
    double psi = 1.0;
    int lambda = 0;
    ClusterMap clusters;
    PatternGraph pattern;
};

// Full sparsification: W = union of per-pattern-edge selections, plus one
// parity element (the smallest id) moved out of every odd residual cluster.
// A maximum matching of the graph on W, joined with arbitrary pairings of
// the residual cliques, is maximum for the whole instance.
SparsifierResult sparsify(std::span<const GeomObject> objects, double psi,
                          StructureKind structure);

// Joins a matching on the kept objects (given in original object ids) with
// the trivial residual pairings.
Matching combine_matchings(const Matching& mw,
                           const std::map<GridPoint, std::vector<int>>& residuals);

}  // namespace geomatch
