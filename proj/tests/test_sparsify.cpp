#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "geomatch/blossom.hpp"
#include "geomatch/errors.hpp"
#include "geomatch/graph.hpp"
#include "geomatch/rng.hpp"
#include "geomatch/sparsify.hpp"
#include "test_util.hpp"

using namespace geomatch;

namespace {

// Unit disks thrown into a square chosen to produce visible cluster overlap.
std::vector<GeomObject> disk_soup(int n, double crowd, std::uint64_t seed) {
    Rng rng(seed);
    return testutil::rand_unit_disks(n, crowd * std::sqrt(static_cast<double>(n)), rng);
}

std::vector<GeomObject> box_soup(int n, double psi, double crowd, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<GeomObject> out;
    const double side = crowd * std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform(0.0, side), y = rng.uniform(0.0, side);
        out.push_back(make_box(x, y, x + rng.uniform(1.0, psi), y + rng.uniform(1.0, psi)));
    }
    return out;
}

}  // namespace

TEST_CASE("cluster keys are the smallest piercing grid points") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto objs = disk_soup(80, 2.0, seed);
        const ClusterMap cm = assign_clusters(objs);
        std::vector<int> seen;
        for (const auto& [p, members] : cm.clusters) {
            CHECK(std::is_sorted(members.begin(), members.end()));
            for (int id : members) {
                seen.push_back(id);
                const auto pts = pierce_points(objs[static_cast<std::size_t>(id)], id);
                CHECK(pts.front() == p);
            }
        }
        std::sort(seen.begin(), seen.end());
        CHECK(seen.size() == objs.size());  // partition, nothing dropped
    }
}

TEST_CASE("pattern graph edges are exactly the near pairs") {
    for (double psi : {2.0, 3.0, 6.0}) {
        const auto objs = psi == 2.0 ? disk_soup(90, 1.6, 11)
                                     : box_soup(90, psi, 1.8, 12);
        const ClusterMap cm = assign_clusters(objs);
        const PatternGraph pg = build_pattern_graph(cm, psi);
        REQUIRE(pg.points.size() == cm.clusters.size());

        const long long reach = static_cast<long long>(2.0 * psi + 1e-9);
        int lambda = 0;
        for (std::size_t i = 0; i < pg.points.size(); ++i) {
            std::vector<int> want;
            for (std::size_t j = 0; j < pg.points.size(); ++j) {
                if (i == j) continue;
                const long long dx = std::abs(pg.points[i].x - pg.points[j].x);
                const long long dy = std::abs(pg.points[i].y - pg.points[j].y);
                if (std::max(dx, dy) <= reach) want.push_back(static_cast<int>(j));
            }
            CHECK(pg.adj[i] == want);
            lambda = std::max(lambda, static_cast<int>(want.size()));
        }
        CHECK(pg.lambda == lambda);
    }
}

TEST_CASE("intersecting objects live in equal or adjacent clusters") {
    const auto objs = disk_soup(120, 1.5, 21);
    const ClusterMap cm = assign_clusters(objs);
    const PatternGraph pg = build_pattern_graph(cm, 2.0);
    std::map<GridPoint, int> index;
    for (std::size_t i = 0; i < pg.points.size(); ++i)
        index[pg.points[i]] = static_cast<int>(i);
    std::vector<int> cluster_of(objs.size(), -1);
    for (const auto& [p, members] : cm.clusters)
        for (int id : members) cluster_of[static_cast<std::size_t>(id)] = index.at(p);

    const IntersectionGraph g = build_graph(objs);
    for (int v = 0; v < g.n; ++v)
        for (int u : g.adj[v]) {
            const int a = cluster_of[static_cast<std::size_t>(v)];
            const int b = cluster_of[static_cast<std::size_t>(u)];
            const bool ok = a == b ||
                            std::binary_search(pg.adj[static_cast<std::size_t>(a)].begin(),
                                               pg.adj[static_cast<std::size_t>(a)].end(), b);
            CHECK(ok);
        }
}

TEST_CASE("query structures answer identically under random scripts") {
    Rng rng(31);
    for (int it = 0; it < 25; ++it) {
        const auto objs = disk_soup(60, rng.uniform(1.2, 2.2),
                                    4000 + static_cast<std::uint64_t>(it));
        const ClusterMap cm = assign_clusters(objs);
        // Pick the largest cluster for a meaty test.
        const std::vector<int>* members = nullptr;
        GridPoint key{};
        for (const auto& [p, ms] : cm.clusters)
            if (!members || ms.size() > members->size()) {
                members = &ms;
                key = p;
            }
        REQUIRE(members != nullptr);

        auto naive = make_query_structure(StructureKind::Naive, objs, *members, key);
        auto fancy = make_query_structure(StructureKind::UnitDisk, objs, *members, key);

        std::vector<int> live = *members;
        for (int op = 0; op < 300; ++op) {
            const double roll = rng.uniform();
            if (roll < 0.12 || live.empty()) {
                naive->rollback();
                fancy->rollback();
                live = *members;
            } else {
                // A probe object somewhere near the cluster.
                const GeomObject probe = make_unit_disk(
                    static_cast<double>(key.x) + rng.uniform(-4.0, 4.0),
                    static_cast<double>(key.y) + rng.uniform(-4.0, 4.0));
                const int a = naive->query(probe);
                const int b = fancy->query(probe);
                CHECK(a == b);
                // Erase the hit, or any live member: correctness must not
                // depend on the query-then-erase discipline.
                int victim = -1;
                if (a >= 0 && rng.uniform() < 0.6)
                    victim = a;
                else if (rng.uniform() < 0.5)
                    victim = live[rng.uniform_index(live.size())];
                if (victim >= 0) {
                    naive->erase(victim);
                    fancy->erase(victim);
                    live.erase(std::find(live.begin(), live.end(), victim));
                }
            }
        }
    }
}

TEST_CASE("query returns the smallest live intersecting id") {
    const auto objs = disk_soup(50, 1.3, 77);
    const ClusterMap cm = assign_clusters(objs);
    Rng rng(7);
    for (const auto& [p, members] : cm.clusters) {
        auto qs = make_query_structure(StructureKind::UnitDisk, objs, members, p);
        const GeomObject probe = make_unit_disk(static_cast<double>(p.x) + 0.3,
                                                static_cast<double>(p.y) - 0.2);
        std::set<int> live(members.begin(), members.end());
        while (true) {
            const int got = qs->query(probe);
            int want = -1;
            for (int id : live)
                if (intersects(objs[static_cast<std::size_t>(id)], probe)) {
                    want = id;
                    break;
                }
            CHECK(got == want);
            if (got < 0) break;
            qs->erase(got);
            live.erase(got);
        }
        qs->rollback();
        // After rollback the first answer returns.
        const int again = qs->query(probe);
        int want = -1;
        for (int id : members)
            if (intersects(objs[static_cast<std::size_t>(id)], probe)) {
                want = id;
                break;
            }
        CHECK(again == want);
    }
}

TEST_CASE("unit-disk structure rejects what it cannot index") {
    const std::vector<GeomObject> mixed{make_unit_disk(0.2, 0.2),
                                        make_disk(0.5, 0.5, 2.0)};
    const std::vector<int> members{0, 1};
    CHECK_THROWS_AS(make_query_structure(StructureKind::UnitDisk, mixed, members,
                                         GridPoint{0, 0}),
                    BadInstance);

    // A member whose expansion does not strictly contain the cluster point.
    const std::vector<GeomObject> far{make_unit_disk(2.5, 0.0)};
    CHECK_THROWS_AS(make_query_structure(StructureKind::UnitDisk, far, {0},
                                         GridPoint{0, 0}),
                    PointNotInterior);

    const std::vector<GeomObject> disks{make_unit_disk(0.3, 0.0)};
    auto qs = make_query_structure(StructureKind::UnitDisk, disks, {0}, GridPoint{0, 0});
    // Non-disk probes are outside the contract; distant ones are just misses.
    CHECK_THROWS_AS(qs->query(make_box(5.0, 5.0, 6.0, 6.0)), BadInstance);
    CHECK(qs->query(make_unit_disk(100.0, 0.0)) == -1);
    CHECK(qs->query(make_unit_disk(1.5, 0.0)) == 0);
}

TEST_CASE("edge selection stays within its budget and rolls back") {
    Rng rng(41);
    for (int it = 0; it < 20; ++it) {
        const auto objs = disk_soup(80, 1.4, 6000 + static_cast<std::uint64_t>(it));
        const ClusterMap cm = assign_clusters(objs);
        const PatternGraph pg = build_pattern_graph(cm, 2.0);
        if (pg.points.size() < 2) continue;

        // First adjacent pair of clusters.
        int pi = -1, qi = -1;
        for (std::size_t i = 0; i < pg.points.size() && pi < 0; ++i)
            if (!pg.adj[i].empty()) {
                pi = static_cast<int>(i);
                qi = pg.adj[i].front();
            }
        if (pi < 0) continue;
        const GridPoint p = pg.points[static_cast<std::size_t>(pi)];
        const GridPoint q = pg.points[static_cast<std::size_t>(qi)];
        const auto& up = cm.clusters.at(p);
        const auto& uq = cm.clusters.at(q);

        auto qs_p = make_query_structure(StructureKind::Naive, objs, up, p);
        auto qs_q = make_query_structure(StructureKind::Naive, objs, uq, q);

        const GeomObject probe_p =
            make_unit_disk(static_cast<double>(p.x), static_cast<double>(p.y));
        const GeomObject probe_q =
            make_unit_disk(static_cast<double>(q.x), static_cast<double>(q.y));
        const int before_p = qs_p->query(probe_p);
        const int before_q = qs_q->query(probe_q);

        const auto sel = sparsify_one_edge(objs, up, uq, pg.lambda, *qs_p, *qs_q);

        CHECK(std::is_sorted(sel.begin(), sel.end()));
        CHECK(std::adjacent_find(sel.begin(), sel.end()) == sel.end());
        CHECK(sel.size() <= static_cast<std::size_t>(4 * pg.lambda + 2));
        for (int id : sel) {
            const bool in_p = std::binary_search(up.begin(), up.end(), id);
            const bool in_q = std::binary_search(uq.begin(), uq.end(), id);
            CHECK((in_p || in_q));
        }

        // Both structures back to their full sets.
        CHECK(qs_p->query(probe_p) == before_p);
        CHECK(qs_q->query(probe_q) == before_q);
    }
}

TEST_CASE("sparsifier output partitions the objects") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto objs = disk_soup(150, 1.3, 7000 + seed);
        const SparsifierResult sp = sparsify(objs, 2.0, StructureKind::Naive);

        std::vector<int> seen = sp.kept;
        for (const auto& [p, ids] : sp.residuals) {
            CHECK(ids.size() % 2 == 0);
            // Residuals are leftovers of one cluster: mutually intersecting.
            for (std::size_t i = 0; i < ids.size(); ++i)
                for (std::size_t j = i + 1; j < ids.size(); ++j)
                    CHECK(intersects(objs[static_cast<std::size_t>(ids[i])],
                                     objs[static_cast<std::size_t>(ids[j])]));
            seen.insert(seen.end(), ids.begin(), ids.end());
        }
        std::sort(seen.begin(), seen.end());
        std::vector<int> want(objs.size());
        for (std::size_t i = 0; i < objs.size(); ++i) want[i] = static_cast<int>(i);
        CHECK(seen == want);
    }
}

TEST_CASE("both structure kinds select the same subfamily") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto objs = disk_soup(130, 1.4, 8000 + seed);
        const SparsifierResult a = sparsify(objs, 2.0, StructureKind::Naive);
        const SparsifierResult b = sparsify(objs, 2.0, StructureKind::UnitDisk);
        CHECK(a.kept == b.kept);
        CHECK(a.residuals == b.residuals);
        CHECK(a.lambda == b.lambda);
    }
}

TEST_CASE("matching through the sparsifier is still maximum") {
    int trials = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (double crowd : {1.2, 1.8}) {
            const auto objs = disk_soup(120, crowd, 9000 + seed);
            const IntersectionGraph g = build_graph(objs);
            const SparsifierResult sp = sparsify(objs, 2.0, StructureKind::Naive);

            const auto sub = induced_subgraph(g, sp.kept);
            Matching mw = blossom_maximum_matching(sub.graph);
            for (auto& [u, v] : mw.pairs) {
                u = sub.to_parent[static_cast<std::size_t>(u)];
                v = sub.to_parent[static_cast<std::size_t>(v)];
            }
            const Matching full = combine_matchings(mw, sp.residuals);
            validate_matching(g, full);
            CHECK(full.size() == blossom_maximum_matching(g).size());
            ++trials;
        }
    }
    CHECK(trials == 20);
}

TEST_CASE("per-cluster keep counts respect the pattern-degree budget") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto objs = disk_soup(160, 1.3, 9900 + seed);
        const SparsifierResult sp = sparsify(objs, 2.0, StructureKind::Naive);
        std::map<GridPoint, int> index;
        for (std::size_t i = 0; i < sp.pattern.points.size(); ++i)
            index[sp.pattern.points[i]] = static_cast<int>(i);

        std::map<GridPoint, int> kept_in;
        std::map<int, GridPoint> cluster_of;
        for (const auto& [p, members] : sp.clusters.clusters)
            for (int id : members) cluster_of[id] = p;
        for (int id : sp.kept) ++kept_in[cluster_of.at(id)];

        const long long lam = sp.lambda;
        for (const auto& [p, cnt] : kept_in) {
            const auto deg = static_cast<long long>(
                sp.pattern.adj[static_cast<std::size_t>(index.at(p))].size());
            CHECK(cnt <= deg * 2 * (2 * lam + 1) * (lam + 1) + 1);
        }
    }
}
