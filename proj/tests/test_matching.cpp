#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "geomatch/blossom.hpp"
#include "geomatch/field_matrix.hpp"
#include "geomatch/graph.hpp"
#include "geomatch/matching.hpp"
#include "geomatch/modular.hpp"
#include "geomatch/rng.hpp"
#include "geomatch/separator.hpp"
#include "test_util.hpp"

using namespace geomatch;

namespace {

std::vector<GeomObject> spread_disks(int n, std::uint64_t seed) {
    Rng rng(seed);
    return testutil::rand_unit_disks(n, 3.2 * std::sqrt(static_cast<double>(n)), rng);
}

testutil::RefMat to_ref(const FieldMatrix& a) {
    testutil::RefMat r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
    return r;
}

}  // namespace

TEST_CASE("random substitution keeps the skew structure") {
    Rng rng(3);
    for (int it = 0; it < 25; ++it) {
        const auto objs = spread_disks(25, 600 + static_cast<std::uint64_t>(it));
        const IntersectionGraph g = build_graph(objs);
        const PrimeField f(gen_prime(static_cast<std::uint64_t>(g.n)).p);
        const FieldMatrix a = tutte_matrix(g, f, rng);
        REQUIRE(a.rows() == static_cast<std::size_t>(g.n));
        for (int i = 0; i < g.n; ++i) {
            CHECK(a.at(i, i) == 0);
            for (int j = 0; j < g.n; ++j) {
                CHECK(a.at(i, j) == f.neg(a.at(j, i)));
                if (!g.has_edge(i, j)) CHECK(a.at(i, j) == 0);
            }
        }
    }
}

TEST_CASE("rank of the substituted matrix is twice the matching number") {
    Rng rng(5);
    for (int it = 0; it < 25; ++it) {
        const auto objs = spread_disks(20, 700 + static_cast<std::uint64_t>(it));
        const IntersectionGraph g = build_graph(objs);
        const PrimeField f(gen_prime(static_cast<std::uint64_t>(g.n)).p);
        const FieldMatrix a = tutte_matrix(g, f, rng);
        const std::size_t nu = blossom_maximum_matching(g).size();
        CHECK(gauss_rank(a) == 2 * nu);
        // Squaring does not lose rank (generic over a big field).
        CHECK(gauss_rank(mat_mul(a, transpose(a))) == 2 * nu);
    }
}

TEST_CASE("size estimate agrees with the oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto objs = spread_disks(30, 800 + seed);
        const IntersectionGraph g = build_graph(objs);
        const int want = static_cast<int>(blossom_maximum_matching(g).size());
        CHECK(matching_size_estimate(g, seed) == want);
    }
}

TEST_CASE("lifted tree relates every distance-two pair") {
    Rng rng(7);
    for (int it = 0; it < 10; ++it) {
        const auto objs = spread_disks(100, 900 + static_cast<std::uint64_t>(it));
        const SeparatorTreeResult res = build_separator_tree(objs, SeparatorParams{}, rng);
        const IntersectionGraph& g = res.split.graph;
        const ZTree lifted = lift_tree_for_square(g, res.tree.tree);

        const std::vector<int> node_of = node_assignment(lifted, g.n);
        std::vector<int> depth(lifted.nodes.size(), 0);
        for (std::size_t t = 0; t < lifted.nodes.size(); ++t) {
            int d = 0;
            for (int w = static_cast<int>(t); w >= 0;
                 w = lifted.nodes[static_cast<std::size_t>(w)].parent)
                ++d;
            depth[t] = d;
        }
        auto related = [&](int u, int v) {
            int a = node_of[static_cast<std::size_t>(u)];
            int b = node_of[static_cast<std::size_t>(v)];
            if (depth[static_cast<std::size_t>(a)] < depth[static_cast<std::size_t>(b)])
                std::swap(a, b);
            while (depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)])
                a = lifted.nodes[static_cast<std::size_t>(a)].parent;
            return a == b;
        };

        // z-sets still partition the vertices.
        std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
        for (const auto& nd : lifted.nodes)
            for (int v : nd.z) {
                CHECK_FALSE(seen[static_cast<std::size_t>(v)]);
                seen[static_cast<std::size_t>(v)] = 1;
            }
        CHECK(std::count(seen.begin(), seen.end(), 1) == g.n);

        // Pattern of A*A^T: edges and shared-neighbor pairs.
        for (int v = 0; v < g.n; ++v) {
            for (int u : g.adj[v]) {
                CHECK(related(u, v));
                for (int w : g.adj[u])
                    if (w != v) CHECK(related(v, w));
            }
        }
    }
}

TEST_CASE("matchable subset induces a perfectly matchable subgraph of full size") {
    Rng rng(11);
    for (int it = 0; it < 15; ++it) {
        const auto objs = spread_disks(40, 1000 + static_cast<std::uint64_t>(it));
        const SeparatorTreeResult res = build_separator_tree(objs, SeparatorParams{}, rng);
        const IntersectionGraph& g = res.split.graph;
        const PrimeField f(gen_prime(static_cast<std::uint64_t>(g.n)).p);
        const std::vector<int> w = extract_matchable_subset(g, res.tree.tree, f, rng);

        CHECK(w.size() % 2 == 0);
        CHECK(std::is_sorted(w.begin(), w.end()));
        const std::size_t nu = blossom_maximum_matching(g).size();
        CHECK(w.size() == 2 * nu);
        const auto sub = induced_subgraph(g, w);
        CHECK(blossom_maximum_matching(sub.graph).size() * 2 == w.size());
    }
}

TEST_CASE("corner of the inverse matches a full reference inversion") {
    Rng rng(13);
    for (int it = 0; it < 10; ++it) {
        const auto objs = spread_disks(30, 1100 + static_cast<std::uint64_t>(it));
        const SeparatorTreeResult res = build_separator_tree(objs, SeparatorParams{}, rng);
        const IntersectionGraph& gs = res.split.graph;
        const PrimeField f(gen_prime(static_cast<std::uint64_t>(gs.n)).p);

        // Work on the perfectly matchable core so the matrix is invertible.
        const std::vector<int> w = extract_matchable_subset(gs, res.tree.tree, f, rng);
        REQUIRE_FALSE(w.empty());
        const auto sub = induced_subgraph(gs, w);

        // The subset's tree: restrict each z-set, keep the shape.
        ZTree sub_tree = res.tree.tree;
        std::vector<int> newid(static_cast<std::size_t>(gs.n), -1);
        for (std::size_t i = 0; i < w.size(); ++i)
            newid[static_cast<std::size_t>(w[i])] = static_cast<int>(i);
        for (auto& nd : sub_tree.nodes) {
            std::vector<int> kept;
            for (int v : nd.z)
                if (newid[static_cast<std::size_t>(v)] >= 0)
                    kept.push_back(newid[static_cast<std::size_t>(v)]);
            nd.z = std::move(kept);
        }

        const FieldMatrix a = tutte_matrix(sub.graph, f, rng);
        std::vector<int> nset;
        for (int v = 0; v < sub.graph.n; ++v)
            if (rng.uniform_index(3) == 0) nset.push_back(v);
        if (nset.empty()) nset.push_back(0);

        const FieldMatrix corner = corner_inverse(a, sub.graph, sub_tree, nset);
        REQUIRE(corner.rows() == nset.size());

        const auto inv = testutil::ref_inverse(to_ref(a), f.p());
        REQUIRE(inv.has_value());
        for (std::size_t i = 0; i < nset.size(); ++i)
            for (std::size_t j = 0; j < nset.size(); ++j)
                CHECK(corner.at(i, j) ==
                      inv->at(static_cast<std::size_t>(nset[i]),
                              static_cast<std::size_t>(nset[j])));
    }
}

TEST_CASE("kept submatching always extends to a perfect matching") {
    Rng rng(17);
    for (int it = 0; it < 15; ++it) {
        const auto objs = spread_disks(36, 1200 + static_cast<std::uint64_t>(it));
        const SeparatorTreeResult res = build_separator_tree(objs, SeparatorParams{}, rng);
        const IntersectionGraph& gs = res.split.graph;
        const PrimeField f(gen_prime(static_cast<std::uint64_t>(gs.n)).p);
        const std::vector<int> w = extract_matchable_subset(gs, res.tree.tree, f, rng);
        if (w.empty()) continue;
        const auto sub = induced_subgraph(gs, w);

        const FieldMatrix a = tutte_matrix(sub.graph, f, rng);
        const auto inv_full = testutil::ref_inverse(to_ref(a), f.p());
        REQUIRE(inv_full.has_value());
        FieldMatrix inv(static_cast<std::size_t>(sub.graph.n),
                        static_cast<std::size_t>(sub.graph.n), f);
        for (std::size_t i = 0; i < inv.rows(); ++i)
            for (std::size_t j = 0; j < inv.cols(); ++j) inv.at(i, j) = inv_full->at(i, j);

        // Candidates: a shuffled slice of the edges.
        std::vector<std::pair<int, int>> cand;
        for (int v = 0; v < sub.graph.n; ++v)
            for (int u : sub.graph.adj[v])
                if (v < u) cand.emplace_back(v, u);
        for (std::size_t i = cand.size(); i > 1; --i)
            std::swap(cand[i - 1], cand[rng.uniform_index(i)]);
        if (cand.size() > 12) cand.resize(12);

        const auto kept = maximal_allowed_submatching(inv, cand);

        // Kept pairs are disjoint and drawn from the candidates.
        std::set<int> used;
        for (const auto& [u, v] : kept) {
            CHECK(used.insert(u).second);
            CHECK(used.insert(v).second);
        }

        // The rest of the graph still matches perfectly.
        std::vector<int> rest;
        for (int v = 0; v < sub.graph.n; ++v)
            if (!used.count(v)) rest.push_back(v);
        const auto rest_sub = induced_subgraph(sub.graph, rest);
        CHECK(blossom_maximum_matching(rest_sub.graph).size() * 2 == rest.size());
    }
}

TEST_CASE("pipeline equals the oracle across families") {
    Rng rng(23);
    int checked = 0;
    for (int it = 0; it < 24; ++it) {
        std::vector<GeomObject> objs;
        const int n = 12 + static_cast<int>(rng.uniform_index(60));
        const double side = 3.0 * std::sqrt(static_cast<double>(n));
        switch (it % 3) {
            case 0: objs = testutil::rand_unit_disks(n, side, rng); break;
            default: objs = testutil::rand_mixed(n, 2.0 * side, rng); break;
        }
        const AlgebraicResult res =
            algebraic_maximum_matching(objs, 3000 + static_cast<std::uint64_t>(it),
                                       AlgebraicOptions{});
        const IntersectionGraph g = build_graph(objs);
        validate_matching(g, res.matching);
        CHECK(res.matching.size() == blossom_maximum_matching(g).size());
        ++checked;
    }
    CHECK(checked == 24);
}

TEST_CASE("keep_split returns the decomposition it used") {
    const auto objs = spread_disks(70, 4242);
    AlgebraicOptions opts;
    opts.keep_split = true;
    const AlgebraicResult res = algebraic_maximum_matching(objs, 9, opts);
    CHECK_FALSE(res.decomposition.tree.tree.nodes.empty());
    CHECK(res.decomposition.split.original_n == 70);
    CHECK_NOTHROW(validate_tree(res.decomposition.split.graph, res.decomposition.tree));
    const IntersectionGraph g = build_graph(objs);
    CHECK(res.matching.size() == blossom_maximum_matching(g).size());
}
