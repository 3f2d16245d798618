#include "geomatch/matching.hpp"

#include <algorithm>
#include <set>

#include "geomatch/errors.hpp"

namespace geomatch {

FieldMatrix tutte_matrix(const IntersectionGraph& g, const PrimeField& f, Rng& rng) {
    FieldMatrix a(g.n, g.n, f);
    for (int u = 0; u < g.n; ++u)
        for (int v : g.adj[u]) {
            if (v <= u) continue;
            std::uint64_t x = rng.uniform_index(f.p());
            a.at(u, v) = x;
            a.at(v, u) = f.neg(x);
        }
    return a;
}

int matching_size_estimate(const IntersectionGraph& g, std::uint64_t seed) {
    if (g.n == 0) return 0;
    PrimeField f(gen_prime(static_cast<std::uint64_t>(g.n)).p);
    Rng rng(seed);
    std::size_t r = gauss_rank(tutte_matrix(g, f, rng));
    if (r % 2 != 0) throw RankMismatch("skew-symmetric matrix produced an odd rank");
    return static_cast<int>(r / 2);
}

ZTree lift_tree_for_square(const IntersectionGraph& g, const ZTree& tree) {
    std::vector<int> node_of = node_assignment(tree, g.n);
    for (int v = 0; v < g.n; ++v)
        if (node_of[v] < 0) throw Error("vertex missing from the tree");

    std::vector<int> depth(tree.nodes.size(), 0);
    for (int i = static_cast<int>(tree.nodes.size()) - 1; i >= 0; --i)
        if (tree.nodes[i].parent >= 0) depth[i] = depth[tree.nodes[i].parent] + 1;
    auto is_anc = [&](int a, int d) {
        while (depth[d] > depth[a]) d = tree.nodes[d].parent;
        return a == d;
    };

    ZTree out;
    out.root = tree.root;
    out.nodes.resize(tree.nodes.size());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        out.nodes[i].left = tree.nodes[i].left;
        out.nodes[i].right = tree.nodes[i].right;
        out.nodes[i].parent = tree.nodes[i].parent;
    }
    // Distance-2 edges stay ancestor-related when each vertex moves to the
    // topmost ancestor whose z-set it touches.
    for (int v = 0; v < g.n; ++v) {
        int best = node_of[v];
        for (int w : g.adj[v]) {
            int t = node_of[w];
            if (depth[t] < depth[best] && is_anc(t, node_of[v])) best = t;
        }
        out.nodes[best].z.push_back(v);
    }
    for (auto& nd : out.nodes) std::sort(nd.z.begin(), nd.z.end());
    return out;
}

namespace {

// Gram matrix A A^T accumulated over common neighbors only.
FieldMatrix square_gram(const FieldMatrix& a, const IntersectionGraph& g) {
    const PrimeField& f = a.field();
    int m = g.n;
    FieldMatrix b(m, m, f);
    for (int k = 0; k < m; ++k) {
        for (int i : g.adj[k]) {
            std::uint64_t aik = f.ready(a.at(i, k));
            for (int j : g.adj[k])
                b.at(i, j) = f.add(b.at(i, j), f.mul_ready(aik, a.at(j, k)));
        }
    }
    return b;
}

ZTree trivial_tree(int n) {
    ZTree t;
    t.nodes.resize(1);
    t.nodes[0].z.resize(n);
    for (int i = 0; i < n; ++i) t.nodes[0].z[i] = i;
    t.root = 0;
    return t;
}

FieldMatrix permute_square(const FieldMatrix& a, const std::vector<int>& order) {
    std::size_t n = a.rows();
    FieldMatrix out(n, n, a.field());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.at(i, j) = a.at(order[i], order[j]);
    return out;
}

}  // namespace

std::vector<int> extract_matchable_subset(const IntersectionGraph& g, const ZTree& tree,
                                          const PrimeField& f, Rng& rng) {
    int m = g.n;
    if (m == 0) return {};
    FieldMatrix a = tutte_matrix(g, f, rng);
    FieldMatrix b = square_gram(a, g);

    auto attempt = [&](const ZTree& t) {
        std::vector<int> order = post_order_permutation(t);
        NdOptions opts;
        opts.on_zero_pivot = ZeroPivotPolicy::DeleteRowCol;
        NdResult nd = nested_dissection_lu(permute_square(b, order), t, order, opts);
        std::vector<char> gone(m, 0);
        for (int pos : nd.deleted) gone[order[pos]] = 1;
        std::vector<int> w;
        for (int v = 0; v < m; ++v)
            if (!gone[v]) w.push_back(v);
        return w;
    };

    std::vector<int> w;
    try {
        w = attempt(lift_tree_for_square(g, tree));
    } catch (const InconsistentOrder&) {
        w = attempt(trivial_tree(m));
    }
    if (w.size() % 2 != 0)
        throw RankMismatch("matchable subset has odd size");
    return w;
}

FieldMatrix corner_inverse(const FieldMatrix& a, const IntersectionGraph& g,
                           const ZTree& tree, const std::vector<int>& nset) {
    const PrimeField& f = a.field();
    const int m = g.n;
    const int s = static_cast<int>(nset.size());
    if (static_cast<int>(a.rows()) != m || static_cast<int>(a.cols()) != m)
        throw Error("corner_inverse: matrix does not match the graph");
    if (s == 0) return FieldMatrix(0, 0, f);

    FieldMatrix b = square_gram(a, g);

    // C = [[A A^T, E_N], [A_{N,*}, 0]]: eliminating the Gram block leaves
    // -A_{N,*} (A A^T)^{-1} E_N = (A^T (A A^T)^{-1})_{N,N} = (A^{-1})_{N,N}
    // in the corner, using skew-symmetry for the sign.
    auto attempt = [&](const ZTree& tc) {
        std::vector<int> order = post_order_permutation(tc);
        std::vector<int> pos(m + s);
        for (int i = 0; i < m + s; ++i) pos[order[i]] = i;
        for (int j = 0; j < s; ++j)
            if (pos[m + j] != m + j)
                throw Error("corner block not ordered last");

        FieldMatrix c(m + s, m + s, f);
        for (int i = 0; i < m; ++i) {
            const std::uint64_t* src = b.row(i);
            std::uint64_t* dst = c.row(pos[i]);
            for (int j = 0; j < m; ++j) dst[pos[j]] = src[j];
        }
        for (int j = 0; j < s; ++j) {
            c.at(pos[nset[j]], m + j) = 1;
            const std::uint64_t* arow = a.row(nset[j]);
            std::uint64_t* crow = c.row(m + j);
            for (int v = 0; v < m; ++v) crow[pos[v]] = arow[v];
        }

        NdOptions opts;
        opts.eliminate_prefix = m;
        NdResult nd = nested_dissection_lu(c, tc, order, opts);
        FieldMatrix inv(s, s, f);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) inv.at(i, j) = nd.lu.at(m + i, m + j);
        return inv;
    };

    try {
        ZTree tc = lift_tree_for_square(g, tree);
        auto& rootz = tc.nodes[tc.root].z;
        for (int j = 0; j < s; ++j) rootz.push_back(m + j);
        return attempt(tc);
    } catch (const InconsistentOrder&) {
        return attempt(trivial_tree(m + s));
    }
}

std::vector<std::pair<int, int>> maximal_allowed_submatching(
    FieldMatrix& inv, std::vector<std::pair<int, int>> cand) {
    const PrimeField& f = inv.field();
    const int s = static_cast<int>(inv.rows());
    std::vector<char> dead(s, 0);
    std::vector<std::pair<int, int>> kept;

    for (auto [u, v] : cand) {
        if (dead[u] || dead[v]) continue;
        if (inv.at(v, u) == 0) continue;  // no perfect matching pins this edge
        kept.emplace_back(u, v);
        dead[u] = dead[v] = 1;

        // Pinning (u,v) deletes both vertices; the surviving block of the
        // inverse is patched by the rank-2 Schur identity
        //   inv'[r][c] = inv[r][c] - inv[r][v] inv[u][v]^-1 inv[u][c]
        //                          - inv[r][u] inv[v][u]^-1 inv[v][c].
        std::uint64_t ia = f.inv(inv.at(u, v));
        std::uint64_t ib = f.inv(inv.at(v, u));
        for (int r = 0; r < s; ++r) {
            if (dead[r]) continue;
            std::uint64_t cu = f.ready(f.mul(inv.at(r, v), ia));
            std::uint64_t cv = f.ready(f.mul(inv.at(r, u), ib));
            if (cu == 0 && cv == 0) continue;
            std::uint64_t* rrow = inv.row(r);
            const std::uint64_t* urow = inv.row(u);
            const std::uint64_t* vrow = inv.row(v);
            for (int c = 0; c < s; ++c) {
                if (dead[c]) continue;
                std::uint64_t delta =
                    f.add(f.mul_ready(cu, urow[c]), f.mul_ready(cv, vrow[c]));
                rrow[c] = f.sub(rrow[c], delta);
            }
        }
    }
    return kept;
}

namespace {

// Subtree intervals over tree nodes plus the vertex -> node map.
struct TreeMeta {
    std::vector<int> tin, tout, node_of;

    TreeMeta(const ZTree& t, int n) : node_of(node_assignment(t, n)) {
        tin.assign(t.nodes.size(), 0);
        tout.assign(t.nodes.size(), 0);
        int timer = 0;
        std::vector<std::pair<int, int>> stack{{t.root, 0}};
        while (!stack.empty()) {
            auto& [node, stage] = stack.back();
            if (stage == 0) {
                tin[node] = timer++;
                stage = 1;
                if (t.nodes[node].left >= 0) {
                    stack.emplace_back(t.nodes[node].left, 0);
                    continue;
                }
            }
            if (stage == 1) {
                stage = 2;
                if (t.nodes[node].right >= 0) {
                    stack.emplace_back(t.nodes[node].right, 0);
                    continue;
                }
            }
            tout[node] = timer;
            stack.pop_back();
        }
    }

    bool in_subtree(int t, int node) const {
        return tin[t] <= tin[node] && tin[node] < tout[t];
    }
};

// Same tree shape with z-sets cut down to the kept vertices (relabeled by
// their positions in `kept`, which is sorted).
ZTree restrict_tree(const ZTree& tree, const std::vector<int>& node_of,
                    const std::vector<int>& kept) {
    ZTree out;
    out.root = tree.root;
    out.nodes.resize(tree.nodes.size());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        out.nodes[i].left = tree.nodes[i].left;
        out.nodes[i].right = tree.nodes[i].right;
        out.nodes[i].parent = tree.nodes[i].parent;
    }
    for (std::size_t l = 0; l < kept.size(); ++l)
        out.nodes[node_of[kept[l]]].z.push_back(static_cast<int>(l));
    return out;
}

struct NodeMatcher {
    const IntersectionGraph& gw;  // graph induced on the matchable subset
    const ZTree& tw;
    const TreeMeta& meta;
    const PrimeField& f;
    Rng& rng;
    int iteration_cap;
    std::vector<std::pair<int, int>> out;

    // Matches every vertex of `verts` (sorted ids of gw, all inside the
    // subtree at `node`): covers this node's z-set by allowed submatchings,
    // then recurses into the children on the survivors.
    void run(int node, std::vector<int> verts) {
        if (verts.empty()) return;
        std::set<std::pair<int, int>> discarded;
        for (int iter = 0;; ++iter) {
            bool z_open = false;
            for (int v : verts)
                if (meta.node_of[v] == node) {
                    z_open = true;
                    break;
                }
            if (!z_open) break;
            if (iter >= iteration_cap)
                throw RankMismatch("iteration cap hit while covering a separator");

            SubgraphResult sub = induced_subgraph(gw, verts);
            const IntersectionGraph& h = sub.graph;
            ZTree lt = restrict_tree(tw, meta.node_of, sub.to_parent);
            FieldMatrix a = tutte_matrix(h, f, rng);

            std::vector<char> take(h.n, 0);
            for (int l = 0; l < h.n; ++l)
                if (meta.node_of[sub.to_parent[l]] == node) {
                    take[l] = 1;
                    for (int u : h.adj[l]) take[u] = 1;
                }
            std::vector<int> nset;
            for (int l = 0; l < h.n; ++l)
                if (take[l]) nset.push_back(l);

            std::vector<int> npos(h.n, -1);
            for (std::size_t i = 0; i < nset.size(); ++i) npos[nset[i]] = static_cast<int>(i);

            // Greedy maximal matching among the not-yet-discarded edges of
            // the neighborhood block.
            std::vector<std::pair<int, int>> cand;
            std::vector<char> used(nset.size(), 0);
            for (int l : nset) {
                if (used[npos[l]]) continue;
                for (int u : h.adj[l]) {
                    if (u <= l || npos[u] < 0 || used[npos[u]]) continue;
                    if (discarded.count({sub.to_parent[l], sub.to_parent[u]})) continue;
                    cand.emplace_back(npos[l], npos[u]);
                    used[npos[l]] = used[npos[u]] = 1;
                    break;
                }
            }
            if (cand.empty())
                throw RankMismatch("separator vertices left with no candidate edges");

            FieldMatrix inv = corner_inverse(a, h, lt, nset);
            auto kept = maximal_allowed_submatching(inv, cand);

            std::set<std::pair<int, int>> kept_set(kept.begin(), kept.end());
            std::vector<char> matched(h.n, 0);
            for (auto e : cand) {
                int wu = sub.to_parent[nset[e.first]];
                int wv = sub.to_parent[nset[e.second]];
                if (kept_set.count(e)) {
                    out.emplace_back(wu, wv);
                    matched[nset[e.first]] = matched[nset[e.second]] = 1;
                } else {
                    discarded.insert({std::min(wu, wv), std::max(wu, wv)});
                }
            }
            std::vector<int> next;
            next.reserve(verts.size());
            for (int l = 0; l < h.n; ++l)
                if (!matched[l]) next.push_back(sub.to_parent[l]);
            verts = std::move(next);
        }

        if (tw.is_leaf(node)) {
            if (!verts.empty())
                throw RankMismatch("leaf kept unmatched vertices");
            return;
        }
        std::vector<int> lv, rv;
        for (int v : verts) {
            if (meta.in_subtree(tw.nodes[node].left, meta.node_of[v]))
                lv.push_back(v);
            else if (meta.in_subtree(tw.nodes[node].right, meta.node_of[v]))
                rv.push_back(v);
            else
                throw RankMismatch("survivor escaped both child subtrees");
        }
        run(tw.nodes[node].left, std::move(lv));
        run(tw.nodes[node].right, std::move(rv));
    }
};

}  // namespace

Matching match_split_graph(const SplitGraph& split, const SeparatorTree& tree,
                           std::uint64_t seed, const AlgebraicOptions& opts,
                           AlgebraicDiagnostics* diag) {
    const IntersectionGraph& gp = split.graph;
    std::vector<GeomObject> base_objs(split.objects.begin(),
                                      split.objects.begin() + split.original_n);
    IntersectionGraph base = build_graph(base_objs);
    PrimeField f(gen_prime(std::max<std::uint64_t>(gp.n, 2)).p);
    Rng root_rng(seed);

    AlgebraicDiagnostics local;
    local.split_count = static_cast<int>(split.splits.size());
    local.rho_hat = tree.params.rho_hat;
    local.prime = f.p();

    std::string last_cause = "none";
    for (int attempt = 0; attempt < opts.restarts; ++attempt) {
        local.attempts = attempt + 1;
        Rng rng = root_rng.fork(static_cast<std::uint64_t>(attempt) + 1);
        try {
            std::vector<int> w = extract_matchable_subset(gp, tree.tree, f, rng);
            local.matchable_size = static_cast<int>(w.size());

            Matching on_split;
            if (!w.empty()) {
                SubgraphResult sub = induced_subgraph(gp, w);
                ZTree lt = restrict_tree(tree.tree, node_assignment(tree.tree, gp.n), w);
                TreeMeta meta(lt, sub.graph.n);
                NodeMatcher nm{sub.graph, lt, meta, f, rng, opts.iteration_cap, {}};
                std::vector<int> all(sub.graph.n);
                for (int i = 0; i < sub.graph.n; ++i) all[i] = i;
                nm.run(lt.root, std::move(all));
                if (2 * nm.out.size() != w.size())
                    throw RankMismatch("recursion left matchable vertices unmatched");
                for (auto [u, v] : nm.out)
                    on_split.pairs.emplace_back(sub.to_parent[u], sub.to_parent[v]);
            }
            validate_matching(gp, on_split);

            Matching m = unsplit_matching(on_split, split, base);
            if (m.size() + split.splits.size() != on_split.size())
                throw RankMismatch("unsplitting lost more pairs than splits");
            if (diag) *diag = local;
            return m;
        } catch (const ZeroPivot& e) {
            last_cause = e.what();
        } catch (const Singular& e) {
            last_cause = e.what();
        } catch (const RankMismatch& e) {
            last_cause = e.what();
        }
    }
    throw RetryExhausted("algebraic matching failed " + std::to_string(opts.restarts) +
                         " seeded attempts; last cause: " + last_cause);
}

AlgebraicResult algebraic_maximum_matching(std::span<const GeomObject> objects,
                                           std::uint64_t seed, const AlgebraicOptions& opts) {
    Rng rng(seed);
    Rng tree_rng = rng.fork(1);
    SeparatorTreeResult dec = build_separator_tree(objects, opts.sep, tree_rng);

    AlgebraicResult res;
    res.matching =
        match_split_graph(dec.split, dec.tree, rng.fork(2).next_u64(), opts, &res.diag);
    if (opts.keep_split) res.decomposition = std::move(dec);
    return res;
}

}  // namespace geomatch
