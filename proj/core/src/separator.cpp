#include "geomatch/separator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "geomatch/errors.hpp"

namespace geomatch {

namespace {

// Distance from a candidate center to the k-th nearest *other* anchor.
double kth_anchor_distance(const std::vector<Vec2>& anchors, Vec2 center, int self, int k) {
    std::vector<double> d;
    d.reserve(anchors.size() - 1);
    for (int i = 0; i < static_cast<int>(anchors.size()); ++i) {
        if (i == self) continue;
        d.push_back(norm(anchors[i] - center));
    }
    k = std::min<int>(k, static_cast<int>(d.size()));
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    return d[k - 1];
}

}  // namespace

CircleSeparatorResult circle_separator(std::span<const GeomObject> objects,
                                       double rho_hat, const SeparatorParams& params,
                                       Rng& rng) {
    const int n = static_cast<int>(objects.size());
    if (n < 2) throw SeparatorNotFound("separator requested for fewer than 2 objects");
    std::vector<Vec2> anchors(n);
    for (int i = 0; i < n; ++i) anchors[i] = anchor(objects[i]);

    const int k = std::max(1, static_cast<int>(std::ceil(n / 20.0)));
    const double z_cap = params.c * std::sqrt(std::max(rho_hat, 1.0) * n);
    const double side_cap = params.alpha * n;

    for (int attempt = 0; attempt < params.max_retries; ++attempt) {
        int best = -1;
        double best_r0 = std::numeric_limits<double>::max();
        for (int t = 0; t < params.candidate_centers; ++t) {
            int cand = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(n)));
            double r0 = kth_anchor_distance(anchors, anchors[cand], cand, k);
            if (r0 < best_r0) {
                best_r0 = r0;
                best = cand;
            }
        }
        double radius = std::max(best_r0, 1e-6) * rng.uniform(1.0, 2.0);
        Circle circle{anchors[best], radius};

        Separation sep;
        for (int i = 0; i < n; ++i) {
            double lo = min_dist(circle.center, objects[i]);
            double hi = max_dist(circle.center, objects[i]);
            if (hi < radius)
                sep.x.push_back(i);
            else if (lo > radius)
                sep.y.push_back(i);
            else
                sep.z.push_back(i);  // touching counts as crossing
        }
        double zs = static_cast<double>(sep.z.size());
        double xs = static_cast<double>(sep.x.size());
        double ys = static_cast<double>(sep.y.size());
        if (zs <= z_cap && xs + zs <= side_cap && ys + zs <= side_cap)
            return {circle, std::move(sep), attempt};
    }
    throw SeparatorNotFound("no circle met the size and balance bounds in " +
                            std::to_string(params.max_retries) + " attempts");
}

namespace {

// Mutable working graph: adjacency sets plus the split log.  Vertex ids are
// stable; each split appends two fresh vertices.
struct Builder {
    std::vector<std::set<int>> adj;
    std::vector<GeomObject> objects;
    std::vector<SplitEvent> events;
    int original_n = 0;

    Builder(const IntersectionGraph& g, const std::vector<GeomObject>& objs)
        : adj(g.n), objects(objs), original_n(g.n) {
        for (int v = 0; v < g.n; ++v) adj[v] = {g.adj[v].begin(), g.adj[v].end()};
    }

    int n() const { return static_cast<int>(adj.size()); }
    int deg(int v) const { return static_cast<int>(adj[v].size()); }

    // v -> v - v' - v'' with the `moved` edges rerouted to v''.
    std::pair<int, int> split(int v, std::vector<int> moved) {
        int vp = n(), vd = n() + 1;
        adj.emplace_back();
        adj.emplace_back();
        objects.push_back(objects[v]);
        objects.push_back(objects[v]);
        for (int u : moved) {
            if (!adj[v].erase(u)) throw Error("split: moved edge not present");
            adj[u].erase(v);
            adj[u].insert(vd);
            adj[vd].insert(u);
        }
        adj[v].insert(vp);
        adj[vp].insert(v);
        adj[vp].insert(vd);
        adj[vd].insert(vp);
        events.push_back({v, vp, vd, std::move(moved)});
        return {vp, vd};
    }

    SplitGraph finish() && {
        SplitGraph out;
        out.objects = std::move(objects);
        out.splits = std::move(events);
        out.original_n = original_n;
        std::vector<std::pair<int, int>> edges;
        for (int v = 0; v < n(); ++v)
            for (int u : adj[v])
                if (v < u) edges.emplace_back(v, u);
        out.graph = make_graph(n(), edges);
        return out;
    }
};

// Core separator gadget on a working graph.  Returns (z_star, x_star, y_star)
// where x_star/y_star are the vertex sets the recursion descends into.
struct GadgetOut {
    std::vector<int> z_star, x_star, y_star;
};

GadgetOut apply_separator_gadget(Builder& b, const Separation& sep) {
    GadgetOut out;
    std::vector<char> in_z(b.n(), 0), in_y(b.n(), 0);
    for (int v : sep.z) in_z[v] = 1;
    for (int v : sep.y) in_y[v] = 1;

    // Inner separator edges first: (u,v) becomes u - d'' - c'' - v with
    // pendant stubs d', c' keeping the matching count exact.
    std::vector<std::pair<int, int>> inner;
    for (int v : sep.z)
        for (int u : b.adj[v])
            if (u < v && static_cast<size_t>(u) < in_z.size() && in_z[u])
                inner.emplace_back(u, v);
    std::sort(inner.begin(), inner.end());
    for (auto [u, v] : inner) {
        auto [cp, cd] = b.split(v, {u});
        auto [dp, dd] = b.split(u, {cd});
        out.z_star.insert(out.z_star.end(), {cp, cd, dp, dd});
    }

    // Then one split per z-vertex, sending its far-side edges to the copy.
    std::vector<int> acopy;
    for (int v : sep.z) {
        std::vector<int> far;
        for (int u : b.adj[v])
            if (static_cast<size_t>(u) < in_y.size() && in_y[u]) far.push_back(u);
        auto [ap, ad] = b.split(v, std::move(far));
        out.z_star.push_back(ap);
        acopy.push_back(ad);
    }

    out.x_star = sep.x;
    out.x_star.insert(out.x_star.end(), sep.z.begin(), sep.z.end());
    std::sort(out.x_star.begin(), out.x_star.end());
    out.y_star = sep.y;
    out.y_star.insert(out.y_star.end(), acopy.begin(), acopy.end());
    std::sort(out.y_star.begin(), out.y_star.end());
    std::sort(out.z_star.begin(), out.z_star.end());
    return out;
}

}  // namespace

SeparatorSplitResult split_separator_vertices(const IntersectionGraph& g,
                                              const std::vector<GeomObject>& objects,
                                              const Separation& sep) {
    Builder b(g, objects);
    GadgetOut out = apply_separator_gadget(b, sep);
    SeparatorSplitResult res;
    res.split = std::move(b).finish();
    res.z_star = std::move(out.z_star);
    res.x_star = std::move(out.x_star);
    res.y_star = std::move(out.y_star);
    return res;
}

namespace {

// Chains degree-reduction splits over a leaf's vertex set until every vertex
// (including the freshly created ones) has degree <= 3.  Appends the new
// vertices to `verts`.
void reduce_leaf_degrees(Builder& b, std::vector<int>& verts) {
    for (size_t idx = 0; idx < verts.size(); ++idx) {
        int v = verts[idx];
        while (b.deg(v) > 3) {
            std::vector<int> nb(b.adj[v].begin(), b.adj[v].end());
            std::vector<int> moved(nb.begin() + 2, nb.end());
            auto [vp, vd] = b.split(v, std::move(moved));
            verts.push_back(vp);
            verts.push_back(vd);  // vd has deg(v)-1 edges; handled later
        }
    }
}

struct TreeBuilder {
    Builder& b;
    const SeparatorParams& params;
    Rng& rng;
    double rho_hat;
    int leaf_cap;
    ZTree tree;
    SeparatorStats stats;

    // Builds the subtree over `verts` (current working-graph ids); returns
    // (node index, subtree vertex count).
    std::pair<int, long long> build(std::vector<int> verts) {
        if (static_cast<int>(verts.size()) <= leaf_cap) {
            reduce_leaf_degrees(b, verts);
            std::sort(verts.begin(), verts.end());
            tree.nodes.push_back({std::move(verts), -1, -1, -1});
            int id = static_cast<int>(tree.nodes.size()) - 1;
            return {id, static_cast<long long>(tree.nodes[id].z.size())};
        }

        std::vector<GeomObject> sub;
        sub.reserve(verts.size());
        for (int v : verts) sub.push_back(b.objects[v]);
        CircleSeparatorResult cs = circle_separator(sub, rho_hat, params, rng);
        stats.seps.push_back({static_cast<int>(verts.size()),
                              static_cast<int>(cs.sep.z.size()),
                              static_cast<int>(cs.sep.x.size() + cs.sep.z.size()),
                              static_cast<int>(cs.sep.y.size() + cs.sep.z.size()),
                              cs.retries, rho_hat});

        Separation sep;
        auto lift = [&](const std::vector<int>& local, std::vector<int>& out) {
            out.reserve(local.size());
            for (int i : local) out.push_back(verts[i]);
        };
        lift(cs.sep.x, sep.x);
        lift(cs.sep.y, sep.y);
        lift(cs.sep.z, sep.z);

        GadgetOut gadget = apply_separator_gadget(b, sep);
        auto [left, nl] = build(std::move(gadget.x_star));
        auto [right, nr] = build(std::move(gadget.y_star));

        std::vector<int> z = std::move(gadget.z_star);

        // Splits can skew the subtree sizes past the recorded balance even
        // when the raw separation was balanced.  Pad the node's own z-set
        // with pendant paths hung off a z-vertex: each pair raises both the
        // total size and the maximum matching by one and never touches the
        // children, so no descendant balance changes.
        long long total = nl + nr + static_cast<long long>(z.size());
        auto balanced = [&] {
            double cap = params.alpha * static_cast<double>(total);
            return static_cast<double>(nl) <= cap && static_cast<double>(nr) <= cap;
        };
        if (!balanced()) {
            // The hook gains one edge, so it needs degree slack: an own
            // z-vertex below the internal cap of 3, else a leaf vertex of the
            // heavier side below the overall cap of 4 (a region that cuts
            // with an empty z-set still has somewhere to hang the chain).
            int hook = -1;
            for (int v : z)
                if (b.deg(v) <= 2) { hook = v; break; }
            if (hook < 0) {
                std::vector<int> stack{nl >= nr ? left : right};
                while (!stack.empty() && hook < 0) {
                    int t = stack.back();
                    stack.pop_back();
                    const auto& nd = tree.nodes[static_cast<std::size_t>(t)];
                    if (tree.is_leaf(t)) {
                        for (int v : nd.z)
                            if (b.deg(v) <= 3) { hook = v; break; }
                    } else {
                        stack.push_back(nd.left);
                        stack.push_back(nd.right);
                    }
                }
            }
            if (hook < 0) throw Error("cannot pad a node with no slack vertex");
            while (!balanced()) {
                auto [vp, vd] = b.split(hook, {});
                z.push_back(vp);
                z.push_back(vd);
                hook = vd;
                total += 2;
            }
        }

        std::sort(z.begin(), z.end());
        tree.nodes.push_back({std::move(z), left, right, -1});
        int id = static_cast<int>(tree.nodes.size()) - 1;
        tree.nodes[left].parent = id;
        tree.nodes[right].parent = id;
        return {id, total};
    }
};

}  // namespace

SeparatorTreeResult build_separator_tree(std::span<const GeomObject> objects,
                                         const SeparatorParams& params, Rng& rng) {
    IntersectionGraph g = build_graph(objects);
    std::vector<GeomObject> objs(objects.begin(), objects.end());
    Builder b(g, objs);

    double rho = std::max(1.0, density_estimate(objects));
    int leaf_cap = std::max(static_cast<int>(params.leaf_cap_factor * rho),
                            params.min_leaf_cap);

    SeparatorTreeResult res;
    res.tree.params.alpha = params.alpha;
    res.tree.params.rho_hat = rho;
    res.tree.params.leaf_cap = leaf_cap;

    TreeBuilder tb{b, params, rng, rho, leaf_cap, {}, {}};
    if (g.n > 0) {
        std::vector<int> all(g.n);
        for (int i = 0; i < g.n; ++i) all[i] = i;
        auto [root, total] = tb.build(std::move(all));
        tb.tree.root = root;
        (void)total;
    } else {
        tb.tree.nodes.push_back({{}, -1, -1, -1});
        tb.tree.root = 0;
    }
    res.split = std::move(b).finish();
    res.tree.tree = std::move(tb.tree);
    res.tree.stats = std::move(tb.stats);

    // Record the achieved constants so the validator checks honest numbers.
    const ZTree& t = res.tree.tree;
    std::vector<long long> size(t.nodes.size(), 0);
    double gamma = 0.0;
    int leaf_bound = 1;
    for (size_t i = 0; i < t.nodes.size(); ++i) {  // children precede parents
        const auto& nd = t.nodes[i];
        size[i] = static_cast<long long>(nd.z.size());
        if (!t.is_leaf(static_cast<int>(i))) {
            size[i] += size[nd.left] + size[nd.right];
            if (size[i] > 0)
                gamma = std::max(gamma, static_cast<double>(nd.z.size()) /
                                            std::sqrt(static_cast<double>(size[i])));
        } else {
            leaf_bound = std::max(leaf_bound, static_cast<int>(nd.z.size()));
        }
    }
    res.tree.params.gamma = gamma;
    res.tree.params.leaf_size_bound = leaf_bound;

    validate_tree(res.split.graph, res.tree);
    return res;
}

Matching unsplit_matching(const Matching& m, const SplitGraph& split,
                          const IntersectionGraph& base) {
    int n = split.graph.n;
    std::vector<int> partner(n, -1);
    for (auto [u, v] : m.pairs) {
        if (u < 0 || v < 0 || u >= n || v >= n || partner[u] != -1 || partner[v] != -1)
            throw InvalidMatching("bad pair in split-graph matching");
        partner[u] = v;
        partner[v] = u;
    }

    auto unmatch = [&](int v) {
        int u = partner[v];
        if (u >= 0) partner[u] = -1;
        partner[v] = -1;
    };

    for (auto it = split.splits.rbegin(); it != split.splits.rend(); ++it) {
        int a = it->anchor, vp = it->vprime, vd = it->vdouble;
        if (partner[vp] == vd) {
            unmatch(vp);
        } else if (partner[vp] == a) {
            unmatch(vp);
            int u = partner[vd];
            if (u >= 0) {
                unmatch(vd);
                partner[a] = u;
                partner[u] = a;
            }
        } else {
            // vp unmatched; a partner of vd rides back to a when a is free.
            int u = partner[vd];
            if (u >= 0) {
                unmatch(vd);
                if (partner[a] == -1) {
                    partner[a] = u;
                    partner[u] = a;
                }
            }
        }
    }

    Matching out;
    for (int v = 0; v < split.original_n; ++v) {
        int u = partner[v];
        if (u > v) {
            if (u >= split.original_n)
                throw InvalidMatching("unsplit left a pair touching a gadget vertex");
            out.pairs.emplace_back(v, u);
        }
    }
    validate_matching(base, out);
    return out;
}

void validate_tree(const IntersectionGraph& g, const SeparatorTree& t) {
    const ZTree& tree = t.tree;
    int n = g.n;
    std::vector<int> node_of(n, -1);
    for (size_t i = 0; i < tree.nodes.size(); ++i)
        for (int v : tree.nodes[i].z) {
            if (v < 0 || v >= n || node_of[v] != -1)
                throw Error("tree z-sets do not partition the vertices");
            node_of[v] = static_cast<int>(i);
        }
    for (int v = 0; v < n; ++v)
        if (node_of[v] == -1) throw Error("vertex missing from every z-set");

    // Ancestor relation via depths.
    std::vector<int> depth(tree.nodes.size(), 0);
    std::vector<long long> size(tree.nodes.size(), 0);
    if (tree.root >= 0) {
        for (int i = static_cast<int>(tree.nodes.size()) - 1; i >= 0; --i) {
            const auto& nd = tree.nodes[i];
            if (nd.parent >= 0) depth[i] = depth[nd.parent] + 1;
        }
        // nodes are created children-first, so a forward pass accumulates sizes
        for (size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& nd = tree.nodes[i];
            size[i] = static_cast<long long>(nd.z.size());
            if (nd.left >= 0) size[i] += size[nd.left];
            if (nd.right >= 0) size[i] += size[nd.right];
        }
    }
    auto is_anc = [&](int a, int d) {
        while (depth[d] > depth[a]) d = tree.nodes[d].parent;
        return a == d;
    };

    for (int v = 0; v < n; ++v) {
        if (static_cast<int>(g.adj[v].size()) > 4)
            throw Error("split graph vertex exceeds degree 4");
        bool internal = node_of[v] >= 0 && !tree.is_leaf(node_of[v]);
        if (internal && static_cast<int>(g.adj[v].size()) > 3)
            throw Error("internal separator vertex exceeds degree 3");
        for (int u : g.adj[v]) {
            int a = node_of[v], bnode = node_of[u];
            if (!is_anc(a, bnode) && !is_anc(bnode, a))
                throw Error("edge joins unrelated tree nodes");
        }
    }

    for (size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& nd = tree.nodes[i];
        if ((nd.left >= 0) != (nd.right >= 0)) throw Error("node with one child");
        if (nd.left >= 0) {
            double cap = t.params.alpha * static_cast<double>(size[i]);
            if (static_cast<double>(size[nd.left]) > cap ||
                static_cast<double>(size[nd.right]) > cap)
                throw Error("child subtree breaks the recorded balance");
            double zcap = t.params.gamma * std::sqrt(static_cast<double>(size[i]));
            if (static_cast<double>(nd.z.size()) > zcap + 1e-9)
                throw Error("z-set breaks the recorded gamma");
        } else if (static_cast<int>(nd.z.size()) > t.params.leaf_size_bound) {
            throw Error("leaf exceeds the recorded size bound");
        }
    }
}

}  // namespace geomatch
