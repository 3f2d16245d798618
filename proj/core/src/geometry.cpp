#include "geomatch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace geomatch {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double sqnorm(Vec2 a) { return a.x * a.x + a.y * a.y; }

GeomObject make_disk(double cx, double cy, double r) {
    GeomObject o;
    o.kind = ShapeKind::Disk;
    o.a = {cx, cy};
    o.r = r;
    return o;
}

GeomObject make_box(double x0, double y0, double x1, double y1) {
    GeomObject o;
    o.kind = ShapeKind::Box;
    o.a = {x0, y0};
    o.b = {x1, y1};
    return o;
}

GeomObject make_unit_disk(double cx, double cy) {
    GeomObject o;
    o.kind = ShapeKind::UnitDisk;
    o.a = {cx, cy};
    o.r = 1.0;
    return o;
}

namespace {

bool le_sq(double lhs, double rhs) {  // lhs <= rhs on squared quantities
    return lhs <= rhs * (1.0 + kEpsRel) + 1e-18;
}

Vec2 clamp_to_box(Vec2 p, const GeomObject& box) {
    return {std::clamp(p.x, box.a.x, box.b.x), std::clamp(p.y, box.a.y, box.b.y)};
}

}  // namespace

bool intersects(const GeomObject& a, const GeomObject& b) {
    const bool da = is_disk_like(a);
    const bool db = is_disk_like(b);
    if (da && db) {
        const double s = a.r + b.r;
        return le_sq(sqnorm(a.a - b.a), s * s);
    }
    if (!da && !db) {
        return a.a.x <= b.b.x && b.a.x <= a.b.x && a.a.y <= b.b.y && b.a.y <= a.b.y;
    }
    const GeomObject& disk = da ? a : b;
    const GeomObject& box = da ? b : a;
    const Vec2 c = clamp_to_box(disk.a, box);
    return le_sq(sqnorm(disk.a - c), disk.r * disk.r);
}

bool contains_point(const GeomObject& o, Vec2 p) {
    if (o.kind == ShapeKind::Box) {
        return o.a.x <= p.x && p.x <= o.b.x && o.a.y <= p.y && p.y <= o.b.y;
    }
    return le_sq(sqnorm(p - o.a), o.r * o.r);
}

double diameter(const GeomObject& o) {
    if (o.kind == ShapeKind::Box) return std::hypot(o.b.x - o.a.x, o.b.y - o.a.y);
    return 2.0 * o.r;
}

Vec2 anchor(const GeomObject& o) {
    if (o.kind == ShapeKind::Box) return {0.5 * (o.a.x + o.b.x), 0.5 * (o.a.y + o.b.y)};
    return o.a;
}

double min_dist(Vec2 q, const GeomObject& o) {
    if (o.kind == ShapeKind::Box) return norm(q - clamp_to_box(q, o));
    return std::max(0.0, norm(q - o.a) - o.r);
}

double max_dist(Vec2 q, const GeomObject& o) {
    if (o.kind == ShapeKind::Box) {
        const double dx = std::max(std::abs(q.x - o.a.x), std::abs(q.x - o.b.x));
        const double dy = std::max(std::abs(q.y - o.a.y), std::abs(q.y - o.b.y));
        return std::hypot(dx, dy);
    }
    return norm(q - o.a) + o.r;
}

std::vector<GridPoint> pierce_points(const GeomObject& o, int object_id) {
    std::vector<GridPoint> pts;
    if (o.kind == ShapeKind::Box) {
        const long long x0 = static_cast<long long>(std::ceil(o.a.x));
        const long long x1 = static_cast<long long>(std::floor(o.b.x));
        const long long y0 = static_cast<long long>(std::ceil(o.a.y));
        const long long y1 = static_cast<long long>(std::floor(o.b.y));
        for (long long x = x0; x <= x1; ++x)
            for (long long y = y0; y <= y1; ++y) pts.push_back({x, y});
    } else {
        const double rr = o.r * o.r * (1.0 + kEpsRel);
        const long long x0 = static_cast<long long>(std::ceil(o.a.x - o.r));
        const long long x1 = static_cast<long long>(std::floor(o.a.x + o.r));
        for (long long x = x0; x <= x1; ++x) {
            const double dx = static_cast<double>(x) - o.a.x;
            const double h2 = rr - dx * dx;
            if (h2 < 0.0) continue;
            const double h = std::sqrt(h2);
            const long long y0 = static_cast<long long>(std::ceil(o.a.y - h));
            const long long y1 = static_cast<long long>(std::floor(o.a.y + h));
            for (long long y = y0; y <= y1; ++y) {
                const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
                if (contains_point(o, p)) pts.push_back({x, y});
            }
        }
    }
    if (pts.empty()) throw EmptyPiercing(object_id);
    std::sort(pts.begin(), pts.end());
    return pts;
}

namespace {

void circle_circle(const GeomObject& a, const GeomObject& b, std::vector<Vec2>& out) {
    const Vec2 d = b.a - a.a;
    const double dist = norm(d);
    if (dist < 1e-15) return;  // concentric, boundaries disjoint or equal
    if (dist > a.r + b.r + 1e-12 || dist < std::abs(a.r - b.r) - 1e-12) return;
    const double t = (a.r * a.r - b.r * b.r + dist * dist) / (2.0 * dist);
    const double h2 = a.r * a.r - t * t;
    const Vec2 u = (1.0 / dist) * d;
    const Vec2 base = a.a + t * u;
    if (h2 <= 0.0) {
        out.push_back(base);
        return;
    }
    const double h = std::sqrt(h2);
    out.push_back({base.x - h * u.y, base.y + h * u.x});
    out.push_back({base.x + h * u.y, base.y - h * u.x});
}

void circle_segment(const GeomObject& disk, Vec2 p0, Vec2 p1, std::vector<Vec2>& out) {
    const Vec2 d = p1 - p0;
    const Vec2 f = p0 - disk.a;
    const double A = sqnorm(d);
    if (A < 1e-30) return;
    const double B = 2.0 * (d.x * f.x + d.y * f.y);
    const double C = sqnorm(f) - disk.r * disk.r;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return;
    const double s = std::sqrt(disc);
    for (const double t : {(-B - s) / (2.0 * A), (-B + s) / (2.0 * A)}) {
        if (t < -1e-12 || t > 1.0 + 1e-12) continue;
        out.push_back(p0 + std::clamp(t, 0.0, 1.0) * d);
        if (disc == 0.0) break;
    }
}

}  // namespace

std::vector<Vec2> boundary_intersections(const GeomObject& a, const GeomObject& b) {
    std::vector<Vec2> out;
    const bool da = is_disk_like(a);
    const bool db = is_disk_like(b);
    if (da && db) {
        circle_circle(a, b, out);
    } else if (da || db) {
        const GeomObject& disk = da ? a : b;
        const GeomObject& box = da ? b : a;
        circle_segment(disk, {box.a.x, box.a.y}, {box.b.x, box.a.y}, out);
        circle_segment(disk, {box.a.x, box.b.y}, {box.b.x, box.b.y}, out);
        circle_segment(disk, {box.a.x, box.a.y}, {box.a.x, box.b.y}, out);
        circle_segment(disk, {box.b.x, box.a.y}, {box.b.x, box.b.y}, out);
    } else {
        // Axis-parallel boundaries cross where a horizontal edge of one box
        // meets a vertical edge of the other.
        const auto cross = [&out](const GeomObject& hbox, const GeomObject& vbox) {
            for (const double yh : {hbox.a.y, hbox.b.y})
                for (const double xv : {vbox.a.x, vbox.b.x})
                    if (hbox.a.x <= xv && xv <= hbox.b.x && vbox.a.y <= yh &&
                        yh <= vbox.b.y)
                        out.push_back({xv, yh});
        };
        cross(a, b);
        cross(b, a);
    }
    return out;
}

namespace {

// Uniform grid over object bounding boxes for point-stabbing queries.
class StabGrid {
  public:
    explicit StabGrid(std::span<const GeomObject> objects) : objects_(objects) {
        double max_diam = 1.0;
        for (const auto& o : objects) max_diam = std::max(max_diam, diameter(o));
        cell_ = max_diam;
        for (std::size_t i = 0; i < objects.size(); ++i) {
            const auto [lo, hi] = bbox(objects[i]);
            for (long long cx = key(lo.x); cx <= key(hi.x); ++cx)
                for (long long cy = key(lo.y); cy <= key(hi.y); ++cy)
                    cells_[{cx, cy}].push_back(static_cast<int>(i));
        }
    }

    int count_containing(Vec2 p) const {
        const auto it = cells_.find({key(p.x), key(p.y)});
        if (it == cells_.end()) return 0;
        int cnt = 0;
        for (const int i : it->second)
            if (contains_point(objects_[static_cast<std::size_t>(i)], p)) ++cnt;
        return cnt;
    }

    static std::pair<Vec2, Vec2> bbox(const GeomObject& o) {
        if (o.kind == ShapeKind::Box) return {o.a, o.b};
        return {{o.a.x - o.r, o.a.y - o.r}, {o.a.x + o.r, o.a.y + o.r}};
    }

  private:
    long long key(double v) const { return static_cast<long long>(std::floor(v / cell_)); }

    struct KeyHash {
        std::size_t operator()(const GridPoint& g) const {
            return std::hash<long long>{}(g.x * 1000003LL + g.y);
        }
    };

    std::span<const GeomObject> objects_;
    double cell_ = 1.0;
    std::unordered_map<GridPoint, std::vector<int>, KeyHash> cells_;
};

bool bbox_overlap(const GeomObject& a, const GeomObject& b) {
    const auto [alo, ahi] = StabGrid::bbox(a);
    const auto [blo, bhi] = StabGrid::bbox(b);
    return alo.x <= bhi.x && blo.x <= ahi.x && alo.y <= bhi.y && blo.y <= ahi.y;
}

constexpr std::size_t kCandidateCap = 200000;

}  // namespace

int depth(std::span<const GeomObject> objects) {
    const std::size_t n = objects.size();
    if (n == 0) return 0;
    std::vector<Vec2> candidates;
    for (const auto& o : objects) {
        candidates.push_back(anchor(o));
        if (o.kind == ShapeKind::Box) {
            candidates.push_back(o.a);
            candidates.push_back(o.b);
            candidates.push_back({o.a.x, o.b.y});
            candidates.push_back({o.b.x, o.a.y});
        }
    }
    constexpr double kNudge = 1e-7;
    for (std::size_t i = 0; i < n && candidates.size() < kCandidateCap; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!bbox_overlap(objects[i], objects[j])) continue;
            for (const Vec2 q : boundary_intersections(objects[i], objects[j])) {
                const Vec2 ni = anchor(objects[i]) - q;
                const Vec2 nj = anchor(objects[j]) - q;
                const double li = std::max(norm(ni), 1e-30);
                const double lj = std::max(norm(nj), 1e-30);
                const Vec2 di = (kNudge / li) * ni;
                const Vec2 dj = (kNudge / lj) * nj;
                candidates.push_back(q);
                candidates.push_back(q + di);
                candidates.push_back(q + dj);
                candidates.push_back(q + di + dj);
            }
        }
    }
    const StabGrid grid(objects);
    int best = 0;
    for (const Vec2 p : candidates) best = std::max(best, grid.count_containing(p));
    return best;
}

namespace {

class Fenwick {
  public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i) {
        for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    }
    int prefix(std::size_t i) const {  // count of indices < i
        int s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }
    int total() const { return prefix(tree_.size() - 1); }
    void reset() { std::fill(tree_.begin(), tree_.end(), 0); }

  private:
    std::vector<int> tree_;
};

}  // namespace

double density_estimate(std::span<const GeomObject> objects) {
    const std::size_t n = objects.size();
    if (n == 0) return 0.0;

    std::vector<double> diams(n);
    for (std::size_t i = 0; i < n; ++i) diams[i] = diameter(objects[i]);
    std::vector<double> diam_sorted = diams;
    std::sort(diam_sorted.begin(), diam_sorted.end());
    diam_sorted.erase(std::unique(diam_sorted.begin(), diam_sorted.end()),
                      diam_sorted.end());

    std::vector<double> radii{0.0};
    for (const double d : diam_sorted) radii.push_back(0.5 * d);

    std::vector<Vec2> candidates;
    for (const auto& o : objects) candidates.push_back(anchor(o));
    constexpr std::size_t kDensityCap = 20000;
    for (std::size_t i = 0; i < n && candidates.size() < kDensityCap; ++i)
        for (std::size_t j = i + 1; j < n && candidates.size() < kDensityCap; ++j) {
            if (!bbox_overlap(objects[i], objects[j])) continue;
            for (const Vec2 q : boundary_intersections(objects[i], objects[j]))
                candidates.push_back(q);
        }

    std::vector<std::pair<double, std::size_t>> by_dist(n);  // (dist, diam rank)
    Fenwick fen(diam_sorted.size());
    int best = 0;
    for (const Vec2 c : candidates) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t rank = static_cast<std::size_t>(
                std::lower_bound(diam_sorted.begin(), diam_sorted.end(), diams[k]) -
                diam_sorted.begin());
            by_dist[k] = {min_dist(c, objects[k]), rank};
        }
        std::sort(by_dist.begin(), by_dist.end());
        fen.reset();
        std::size_t ptr = 0;
        for (const double rx : radii) {
            while (ptr < n && by_dist[ptr].first <= rx * (1.0 + kEpsRel) + 1e-12) {
                fen.add(by_dist[ptr].second);
                ++ptr;
            }
            // objects with diameter >= 2 * rx
            const std::size_t cut = static_cast<std::size_t>(
                std::lower_bound(diam_sorted.begin(), diam_sorted.end(),
                                 2.0 * rx * (1.0 - kEpsRel) - 1e-12) -
                diam_sorted.begin());
            best = std::max(best, fen.total() - fen.prefix(cut));
        }
    }
    return static_cast<double>(best);
}

void validate_instance(const Instance& inst) {
    const double psi = inst.params.psi;
    if (!(psi >= 1.0)) throw BadInstance("psi must be at least 1");
    for (std::size_t i = 0; i < inst.objects.size(); ++i) {
        const GeomObject& o = inst.objects[i];
        const std::string id = "object " + std::to_string(i);
        if (o.kind == ShapeKind::Box) {
            const double w = o.b.x - o.a.x;
            const double h = o.b.y - o.a.y;
            if (!(w >= 0.0 && h >= 0.0)) throw BadInstance(id + ": inverted box");
            if (w < 1.0 - kEpsRel || h < 1.0 - kEpsRel)
                throw BadInstance(id + ": does not contain a unit square");
            if (std::max(w, h) > psi * (1.0 + kEpsRel))
                throw BadInstance(id + ": does not fit in a square of side psi");
        } else {
            if (!(o.r > 0.0)) throw BadInstance(id + ": nonpositive radius");
            if (o.r * std::sqrt(2.0) < 1.0 - kEpsRel)
                throw BadInstance(id + ": does not contain a unit square");
            if (2.0 * o.r > psi * (1.0 + kEpsRel))
                throw BadInstance(id + ": does not fit in a square of side psi");
        }
    }
}

}  // namespace geomatch
