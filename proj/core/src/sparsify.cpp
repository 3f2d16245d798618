#include "geomatch/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <utility>

#include "geomatch/disk_union.hpp"
#include "geomatch/errors.hpp"

namespace geomatch {

ClusterMap assign_clusters(std::span<const GeomObject> objects) {
    ClusterMap cm;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        GridPoint key = pierce_points(objects[i], static_cast<int>(i)).front();
        cm.clusters[key].push_back(static_cast<int>(i));
    }
    return cm;
}

PatternGraph build_pattern_graph(const ClusterMap& cm, double psi) {
    PatternGraph pg;
    std::map<GridPoint, int> index;
    for (const auto& [pt, members] : cm.clusters) {
        index.emplace(pt, static_cast<int>(pg.points.size()));
        pg.points.push_back(pt);
    }
    pg.adj.resize(pg.points.size());
    // Two intersecting objects share a point z; their pierce points are both
    // within L-inf distance psi of z, so clusters that can interact sit at
    // L-inf distance <= 2 psi.  Grid points make the radius integral.
    const long long reach = static_cast<long long>(std::floor(2.0 * psi + 1e-9));
    for (std::size_t i = 0; i < pg.points.size(); ++i) {
        const GridPoint p = pg.points[i];
        for (long long dx = -reach; dx <= reach; ++dx) {
            for (long long dy = -reach; dy <= reach; ++dy) {
                if (dx == 0 && dy == 0) continue;
                auto it = index.find(GridPoint{p.x + dx, p.y + dy});
                if (it != index.end()) pg.adj[i].push_back(it->second);
            }
        }
        std::sort(pg.adj[i].begin(), pg.adj[i].end());
        pg.lambda = std::max(pg.lambda, static_cast<int>(pg.adj[i].size()));
    }
    return pg;
}

namespace {

class NaiveStructure final : public ClusterQueryStructure {
  public:
    NaiveStructure(std::span<const GeomObject> objects, const std::vector<int>& members)
        : ids_(members), deleted_(members.size(), 0) {
        shapes_.reserve(members.size());
        for (int id : members) shapes_.push_back(objects[static_cast<std::size_t>(id)]);
    }

    int query(const GeomObject& u) override {
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            if (!deleted_[i] && intersects(shapes_[i], u)) return ids_[i];
        }
        return -1;
    }

    void erase(int id) override {
        std::size_t idx = live_index(id);
        deleted_[idx] = 1;
        undo_.push_back(idx);
    }

    void rollback() override {
        for (std::size_t idx : undo_) deleted_[idx] = 0;
        undo_.clear();
    }

  private:
    std::size_t live_index(int id) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id)
            throw Error("cluster erase: id is not a member");
        auto idx = static_cast<std::size_t>(it - ids_.begin());
        if (deleted_[idx]) throw Error("cluster erase: id already deleted");
        return idx;
    }

    std::vector<int> ids_;
    std::vector<GeomObject> shapes_;
    std::vector<char> deleted_;
    std::vector<std::size_t> undo_;
};

// Canonical-subset tree over the members (in id order).  Each node stores the
// star-shaped union of the radius-2 expansions of its range, so "does any
// member of the range intersect the unit disk at x" is one membership test.
// Queries descend left first, giving the smallest intersecting index; deleted
// members are skipped by resuming the descent past them, which costs one
// extra descent per deletion and keeps the tree itself immutable.
class UnitDiskStructure final : public ClusterQueryStructure {
  public:
    UnitDiskStructure(std::span<const GeomObject> objects, const std::vector<int>& members,
                      GridPoint p)
        : q_{static_cast<double>(p.x), static_cast<double>(p.y)}, ids_(members) {
        expanded_.reserve(ids_.size());
        for (int id : ids_) {
            const GeomObject& o = objects[static_cast<std::size_t>(id)];
            if (!is_disk_like(o) || std::abs(o.r - 1.0) > kEpsRel)
                throw BadInstance("unit-disk structure: member is not a unit disk");
            if (norm(q_ - o.a) >= 2.0)
                throw PointNotInterior(
                    "unit-disk structure: cluster point not interior to an expanded member");
            expanded_.push_back(make_disk(o.a.x, o.a.y, 2.0));
        }
        deleted_.assign(ids_.size(), 0);
        if (!ids_.empty()) build(0, static_cast<int>(ids_.size()));
    }

    int query(const GeomObject& u) override {
        if (!is_disk_like(u) || std::abs(u.r - 1.0) > kEpsRel)
            throw BadInstance("unit-disk structure: query object is not a unit disk");
        if (ids_.empty()) return -1;
        // Unit disks intersect iff the query center lies in the expansion.
        int from = prefix_;
        while (true) {
            int i = find_first(0, from, u.a);
            if (i < 0) return -1;
            if (!deleted_[static_cast<std::size_t>(i)]) return ids_[static_cast<std::size_t>(i)];
            from = i + 1;
        }
    }

    void erase(int id) override {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id)
            throw Error("cluster erase: id is not a member");
        auto idx = static_cast<std::size_t>(it - ids_.begin());
        if (deleted_[idx]) throw Error("cluster erase: id already deleted");
        deleted_[idx] = 1;
        undo_.push_back(idx);
        while (prefix_ < static_cast<int>(ids_.size()) &&
               deleted_[static_cast<std::size_t>(prefix_)])
            ++prefix_;
    }

    void rollback() override {
        for (std::size_t idx : undo_) deleted_[idx] = 0;
        undo_.clear();
        prefix_ = 0;
    }

  private:
    struct Node {
        int lo = 0;
        int hi = 0;
        int left = -1;
        int right = -1;
        StarUnion un;
    };

    int build(int lo, int hi) {
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{lo, hi, -1, -1, {}});
        if (hi - lo == 1) {
            nodes_[static_cast<std::size_t>(id)].un =
                StarUnion{q_, {StarArc{-std::numbers::pi, lo}}};
            return id;
        }
        int mid = lo + (hi - lo) / 2;
        int l = build(lo, mid);
        int r = build(mid, hi);
        Node& nd = nodes_[static_cast<std::size_t>(id)];
        nd.left = l;
        nd.right = r;
        nd.un = merge_unions(nodes_[static_cast<std::size_t>(l)].un,
                             nodes_[static_cast<std::size_t>(r)].un, expanded_);
        return id;
    }

    // Smallest index >= from whose expanded disk contains x, deletions
    // ignored (the caller skips those).
    int find_first(int nid, int from, Vec2 x) const {
        const Node& nd = nodes_[static_cast<std::size_t>(nid)];
        if (nd.hi <= from) return -1;
        if (!union_contains(nd.un, expanded_, x)) return -1;
        if (nd.hi - nd.lo == 1) return nd.lo;
        int hit = find_first(nd.left, from, x);
        return hit >= 0 ? hit : find_first(nd.right, from, x);
    }

    Vec2 q_;
    std::vector<int> ids_;
    std::vector<GeomObject> expanded_;
    std::vector<Node> nodes_;
    std::vector<char> deleted_;
    std::vector<std::size_t> undo_;
    int prefix_ = 0;  // indices below are all deleted
};

}  // namespace

std::unique_ptr<ClusterQueryStructure> make_query_structure(
    StructureKind kind, std::span<const GeomObject> objects,
    const std::vector<int>& members, GridPoint p) {
    if (kind == StructureKind::UnitDisk)
        return std::make_unique<UnitDiskStructure>(objects, members, p);
    return std::make_unique<NaiveStructure>(objects, members);
}

std::vector<int> sparsify_one_edge(std::span<const GeomObject> objects,
                                   const std::vector<int>& up,
                                   const std::vector<int>& uq, int lambda,
                                   ClusterQueryStructure& qs_p,
                                   ClusterQueryStructure& qs_q) {
    qs_p.rollback();
    qs_q.rollback();
    const std::size_t cap = 2 * static_cast<std::size_t>(lambda) + 1;

    // Phase 1: greedy cross matching.  The p side is consumed in ascending id
    // order; matched q-side objects are deleted so they cannot repeat.
    std::vector<std::pair<int, int>> m;
    for (std::size_t next = 0; m.size() < cap && next < up.size(); ++next) {
        int u = up[next];
        int v = qs_q.query(objects[static_cast<std::size_t>(u)]);
        if (v >= 0) {
            qs_q.erase(v);
            m.emplace_back(u, v);
        }
    }

    std::vector<int> w;
    for (auto [a, b] : m) {
        w.push_back(a);
        w.push_back(b);
    }
    if (m.size() < cap) {
        // The matching is maximal across the pair, so its endpoints cover
        // every crossing edge; keeping lambda cross-neighbors per endpoint
        // (from the full opposite cluster) preserves enough of them.
        qs_q.rollback();
        for (auto [a, b] : m) {
            for (int t = 0; t < lambda; ++t) {
                int v = qs_q.query(objects[static_cast<std::size_t>(a)]);
                if (v < 0) break;
                qs_q.erase(v);
                w.push_back(v);
            }
            qs_q.rollback();
            for (int t = 0; t < lambda; ++t) {
                int u = qs_p.query(objects[static_cast<std::size_t>(b)]);
                if (u < 0) break;
                qs_p.erase(u);
                w.push_back(u);
            }
            qs_p.rollback();
        }
    }
    qs_p.rollback();
    qs_q.rollback();
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
}

SparsifierResult sparsify(std::span<const GeomObject> objects, double psi,
                          StructureKind structure) {
    SparsifierResult res;
    res.psi = psi;
    res.clusters = assign_clusters(objects);
    res.pattern = build_pattern_graph(res.clusters, psi);
    res.lambda = res.pattern.lambda;

    const auto& pts = res.pattern.points;
    std::vector<const std::vector<int>*> members;
    members.reserve(pts.size());
    for (const GridPoint& pt : pts) members.push_back(&res.clusters.clusters.at(pt));

    std::vector<std::unique_ptr<ClusterQueryStructure>> qs(pts.size());
    auto get = [&](std::size_t i) -> ClusterQueryStructure& {
        if (!qs[i]) qs[i] = make_query_structure(structure, objects, *members[i], pts[i]);
        return *qs[i];
    };

    std::vector<char> in_w(objects.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int j : res.pattern.adj[i]) {
            if (static_cast<std::size_t>(j) <= i) continue;
            auto w = sparsify_one_edge(objects, *members[i],
                                       *members[static_cast<std::size_t>(j)], res.lambda,
                                       get(i), get(static_cast<std::size_t>(j)));
            for (int id : w) in_w[static_cast<std::size_t>(id)] = 1;
        }
    }

    // Residual members of one cluster pairwise intersect (they share the
    // cluster point), so they only need an even count; odd clusters donate
    // their smallest id to W.
    for (const auto& [pt, mem] : res.clusters.clusters) {
        std::vector<int> rest;
        for (int id : mem) {
            if (!in_w[static_cast<std::size_t>(id)]) rest.push_back(id);
        }
        if (rest.size() % 2 == 1) {
            in_w[static_cast<std::size_t>(rest.front())] = 1;
            rest.erase(rest.begin());
        }
        if (!rest.empty()) res.residuals.emplace(pt, std::move(rest));
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (in_w[i]) res.kept.push_back(static_cast<int>(i));
    }
    return res;
}

Matching combine_matchings(const Matching& mw,
                           const std::map<GridPoint, std::vector<int>>& residuals) {
    Matching out = mw;
    for (const auto& [pt, ids] : residuals) {
        if (ids.size() % 2 != 0)
            throw Error("combine_matchings: residual cluster has odd size");
        for (std::size_t k = 0; k + 1 < ids.size(); k += 2)
            out.pairs.emplace_back(ids[k], ids[k + 1]);
    }
    return out;
}

}  // namespace geomatch
