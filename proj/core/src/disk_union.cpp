#include "geomatch/disk_union.hpp"

#include <algorithm>
#include <cmath>

#include "geomatch/errors.hpp"

namespace geomatch {

namespace {

constexpr double kPi = 3.14159265358979323846;

double angle_from(Vec2 q, Vec2 x) { return std::atan2(x.y - q.y, x.x - q.x); }

// Index of the arc active at angle theta.
std::size_t arc_at(const StarUnion& u, double theta) {
    const auto& arcs = u.arcs;
    auto it = std::upper_bound(arcs.begin(), arcs.end(), theta,
                               [](double t, const StarArc& a) { return t < a.start; });
    if (it == arcs.begin()) return arcs.size() - 1;  // wrapped before first start
    return static_cast<std::size_t>(it - arcs.begin()) - 1;
}

void check_interior(std::span<const GeomObject> disks, Vec2 q) {
    for (const auto& d : disks) {
        if (!is_disk_like(d)) throw PointNotInterior("union member is not a disk");
        if (norm(d.a - q) >= d.r)
            throw PointNotInterior("pierce point not strictly inside a union member");
    }
}

}  // namespace

double ray_exit(Vec2 q, Vec2 c, double r, double theta) {
    Vec2 u{std::cos(theta), std::sin(theta)};
    Vec2 cq = c - q;
    double along = u.x * cq.x + u.y * cq.y;
    double disc = along * along - sqnorm(cq) + r * r;
    return along + std::sqrt(std::max(disc, 0.0));
}

StarUnion merge_unions(const StarUnion& a, const StarUnion& b,
                       std::span<const GeomObject> disks) {
    std::vector<double> cuts;
    cuts.reserve(a.arcs.size() + b.arcs.size() + 8);
    for (const auto& arc : a.arcs) cuts.push_back(arc.start);
    for (const auto& arc : b.arcs) cuts.push_back(arc.start);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    StarUnion out;
    out.q = a.q;
    for (std::size_t s = 0; s < cuts.size(); ++s) {
        double lo = cuts[s];
        double hi = s + 1 < cuts.size() ? cuts[s + 1] : cuts.front() + 2 * kPi;
        int da = a.arcs[arc_at(a, lo)].disk;
        int db = b.arcs[arc_at(b, lo)].disk;

        std::vector<double> sub{lo};
        if (da != db) {
            for (Vec2 x : boundary_intersections(disks[da], disks[db])) {
                double t = angle_from(out.q, x);
                for (double cand : {t, t + 2 * kPi})
                    if (cand > lo + 1e-13 && cand < hi - 1e-13) sub.push_back(cand);
            }
            std::sort(sub.begin(), sub.end());
        }
        for (std::size_t i = 0; i < sub.size(); ++i) {
            double mid = 0.5 * (sub[i] + (i + 1 < sub.size() ? sub[i + 1] : hi));
            double ra = ray_exit(out.q, disks[da].a, disks[da].r, mid);
            double rb = ray_exit(out.q, disks[db].a, disks[db].r, mid);
            int owner = rb > ra ? db : da;
            double start = sub[i] >= kPi ? sub[i] - 2 * kPi : sub[i];
            out.arcs.push_back({start, owner});
        }
    }

    std::sort(out.arcs.begin(), out.arcs.end(),
              [](const StarArc& x, const StarArc& y) { return x.start < y.start; });
    // Fuse consecutive arcs owned by the same disk.  When the first and last
    // arcs share an owner they are one arc across the wrap, so the front
    // boundary disappears and the last arc covers it from below.
    std::vector<StarArc> fused;
    for (const auto& arc : out.arcs)
        if (fused.empty() || fused.back().disk != arc.disk) fused.push_back(arc);
    while (fused.size() > 1 && fused.front().disk == fused.back().disk)
        fused.erase(fused.begin());
    out.arcs = std::move(fused);
    return out;
}

StarUnion union_pierced(std::span<const GeomObject> disks, Vec2 q) {
    if (disks.empty()) throw PointNotInterior("empty disk family");
    check_interior(disks, q);

    // bottom-up divide and conquer over the index range
    std::vector<StarUnion> level;
    level.reserve(disks.size());
    for (std::size_t i = 0; i < disks.size(); ++i)
        level.push_back({q, {{-kPi, static_cast<int>(i)}}});
    while (level.size() > 1) {
        std::vector<StarUnion> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(merge_unions(level[i], level[i + 1], disks));
        if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
        level = std::move(next);
    }
    return level.front();
}

bool union_contains(const StarUnion& u, std::span<const GeomObject> disks, Vec2 x) {
    Vec2 d = x - u.q;
    if (sqnorm(d) == 0.0) return true;
    double theta = std::atan2(d.y, d.x);
    const GeomObject& o = disks[u.arcs[arc_at(u, theta)].disk];
    return norm(d) <= ray_exit(u.q, o.a, o.r, theta);
}

}  // namespace geomatch
