#include "geomatch/field_matrix.hpp"

#include <algorithm>
#include <string>

namespace geomatch {

std::vector<int> post_order_permutation(const ZTree& tree) {
    std::vector<int> order;
    if (tree.root < 0) return order;
    // Explicit stack: children first, own z-set on exit.
    std::vector<std::pair<int, bool>> stack{{tree.root, false}};
    while (!stack.empty()) {
        auto [t, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            std::vector<int> z = tree.nodes[t].z;
            std::sort(z.begin(), z.end());
            order.insert(order.end(), z.begin(), z.end());
            continue;
        }
        stack.push_back({t, true});
        if (tree.nodes[t].right >= 0) stack.push_back({tree.nodes[t].right, false});
        if (tree.nodes[t].left >= 0) stack.push_back({tree.nodes[t].left, false});
    }
    return order;
}

std::vector<int> node_assignment(const ZTree& tree, int n) {
    std::vector<int> node_of(static_cast<std::size_t>(n), -1);
    for (std::size_t t = 0; t < tree.nodes.size(); ++t)
        for (const int v : tree.nodes[t].z) node_of[static_cast<std::size_t>(v)] = static_cast<int>(t);
    return node_of;
}

FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.cols() != b.rows() || a.field().p() != b.field().p())
        throw Error("mat_mul shape or field mismatch");
    const PrimeField& f = a.field();
    const std::uint64_t p = f.p();
    FieldMatrix c(a.rows(), b.cols(), f);
    const unsigned __int128 prod_max =
        static_cast<unsigned __int128>(p - 1) * (p - 1);
    const unsigned __int128 room = ~static_cast<unsigned __int128>(0) - prod_max;
    std::size_t batch = a.cols();
    if (prod_max > 0 && room / prod_max < a.cols())
        batch = static_cast<std::size_t>(room / prod_max) + 1;

    std::vector<unsigned __int128> acc(b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t k0 = 0; k0 < a.cols(); k0 += batch) {
            const std::size_t k1 = std::min(a.cols(), k0 + batch);
            for (std::size_t k = k0; k < k1; ++k) {
                const std::uint64_t av = a.at(i, k);
                if (av == 0) continue;
                const std::uint64_t* brow = b.row(k);
                for (std::size_t j = 0; j < b.cols(); ++j)
                    acc[j] += static_cast<unsigned __int128>(av) * brow[j];
            }
            if (k1 < a.cols())
                for (auto& v : acc) v %= p;
        }
        std::uint64_t* crow = c.row(i);
        for (std::size_t j = 0; j < b.cols(); ++j)
            crow[j] = static_cast<std::uint64_t>(acc[j] % p);
    }
    return c;
}

FieldMatrix transpose(const FieldMatrix& a) {
    FieldMatrix t(a.cols(), a.rows(), a.field());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t.at(j, i) = a.at(i, j);
    return t;
}

std::size_t gauss_rank(FieldMatrix a) {
    const PrimeField& f = a.field();
    const std::size_t n = std::min(a.rows(), a.cols());
    std::size_t r = 0;
    for (; r < n; ++r) {
        // Full pivoting: any nonzero of the trailing submatrix may serve, so
        // take the first one in row-major scan order.
        std::size_t pr = a.rows(), pc = 0;
        for (std::size_t i = r; i < a.rows() && pr == a.rows(); ++i)
            for (std::size_t j = r; j < a.cols(); ++j)
                if (a.at(i, j) != 0) {
                    pr = i;
                    pc = j;
                    break;
                }
        if (pr == a.rows()) break;
        if (pr != r)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a.at(r, j), a.at(pr, j));
        if (pc != r)
            for (std::size_t i = 0; i < a.rows(); ++i) std::swap(a.at(i, r), a.at(i, pc));
        const std::uint64_t inv = f.inv(a.at(r, r));
        for (std::size_t i = r + 1; i < a.rows(); ++i) {
            if (a.at(i, r) == 0) continue;
            const std::uint64_t fac = f.ready(f.mul(a.at(i, r), inv));
            std::uint64_t* ri = a.row(i);
            const std::uint64_t* rr = a.row(r);
            for (std::size_t j = r; j < a.cols(); ++j)
                ri[j] = f.sub(ri[j], f.mul_ready(fac, rr[j]));
        }
    }
    return r;
}

PartialElimination partial_eliminate(const FieldMatrix& a, std::size_t k) {
    if (k > a.rows() || k > a.cols()) throw Error("partial_eliminate: k too large");
    const PrimeField& f = a.field();
    FieldMatrix m = a;
    for (std::size_t d = 0; d < k; ++d) {
        const std::uint64_t piv = m.at(d, d);
        if (piv == 0) throw ZeroPivot(d);
        const std::uint64_t inv = f.inv(piv);
        for (std::size_t i = d + 1; i < m.rows(); ++i) {
            if (m.at(i, d) == 0) continue;
            const std::uint64_t fac = f.mul(m.at(i, d), inv);
            m.at(i, d) = fac;
            const std::uint64_t fr = f.ready(fac);
            std::uint64_t* ri = m.row(i);
            const std::uint64_t* rd = m.row(d);
            for (std::size_t j = d + 1; j < m.cols(); ++j)
                ri[j] = f.sub(ri[j], f.mul_ready(fr, rd[j]));
        }
    }
    PartialElimination out{
        FieldMatrix(k, k, f), FieldMatrix(k, k, f), FieldMatrix(a.rows() - k, k, f),
        FieldMatrix(k, a.cols() - k, f), FieldMatrix(a.rows() - k, a.cols() - k, f)};
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j)
                out.L.at(i, j) = 1;
            else if (i > j)
                out.L.at(i, j) = m.at(i, j);
            if (i <= j) out.U.at(i, j) = m.at(i, j);
        }
    for (std::size_t i = k; i < a.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) out.below.at(i - k, j) = m.at(i, j);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = k; j < a.cols(); ++j) out.right.at(i, j - k) = m.at(i, j);
    for (std::size_t i = k; i < a.rows(); ++i)
        for (std::size_t j = k; j < a.cols(); ++j) out.schur.at(i - k, j - k) = m.at(i, j);
    return out;
}

namespace {

struct TreeIndex {
    std::vector<int> tin, tout;  // Euler intervals for ancestor tests
    std::vector<int> node_of;    // vertex -> node
    std::vector<int> parent;
    std::vector<std::size_t> z_lo, z_hi;  // position range of each z-set
    std::vector<std::size_t> sub_lo, sub_hi;  // position range of each subtree

    bool is_ancestor(int a, int d) const {  // a ancestor-or-equal of d
        return tin[a] <= tin[d] && tout[d] <= tout[a];
    }
};

TreeIndex index_tree(const ZTree& tree, const std::vector<int>& order, std::size_t m) {
    TreeIndex ti;
    const std::size_t nn = tree.nodes.size();
    ti.tin.assign(nn, 0);
    ti.tout.assign(nn, 0);
    ti.parent.assign(nn, -1);
    ti.z_lo.assign(nn, m);
    ti.z_hi.assign(nn, 0);
    ti.sub_lo.assign(nn, m);
    ti.sub_hi.assign(nn, 0);
    ti.node_of = node_assignment(tree, static_cast<int>(m));

    std::vector<std::size_t> pos(m, m);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int v = order[i];
        if (v < 0 || static_cast<std::size_t>(v) >= m || pos[static_cast<std::size_t>(v)] != m)
            throw InconsistentOrder("order is not a permutation of the vertices");
        pos[static_cast<std::size_t>(v)] = i;
    }
    if (order.size() != m) throw InconsistentOrder("order size mismatch");
    for (std::size_t v = 0; v < m; ++v)
        if (ti.node_of[v] < 0)
            throw InconsistentOrder("vertex missing from every z-set");

    int clock = 0;
    // Iterative DFS for Euler intervals and range checks.
    std::vector<std::pair<int, bool>> stack{{tree.root, false}};
    while (!stack.empty()) {
        auto [t, expanded] = stack.back();
        stack.pop_back();
        if (!expanded) {
            ti.tin[t] = clock++;
            stack.push_back({t, true});
            for (const int ch : {tree.nodes[t].right, tree.nodes[t].left})
                if (ch >= 0) {
                    ti.parent[ch] = t;
                    stack.push_back({ch, false});
                }
            continue;
        }
        ti.tout[t] = clock;
        const std::size_t zsz = tree.nodes[t].z.size();
        std::size_t zlo = m, zhi = 0;
        for (const int v : tree.nodes[t].z) {
            const std::size_t q = pos[static_cast<std::size_t>(v)];
            zlo = std::min(zlo, q);
            zhi = std::max(zhi, q + 1);
        }
        std::size_t slo = m, shi = 0;
        std::size_t child_sz = 0;
        bool any = zsz > 0;
        if (zsz > 0) {
            slo = zlo;
            shi = zhi;
        }
        for (const int ch : {tree.nodes[t].left, tree.nodes[t].right})
            if (ch >= 0 && ti.sub_lo[ch] < ti.sub_hi[ch]) {
                slo = std::min(slo, ti.sub_lo[ch]);
                shi = std::max(shi, ti.sub_hi[ch]);
                child_sz += ti.sub_hi[ch] - ti.sub_lo[ch];
                any = true;
            }
        if (!any) {
            ti.z_lo[t] = ti.z_hi[t] = ti.sub_lo[t] = ti.sub_hi[t] = m;
            continue;
        }
        if (zsz > 0 && zhi - zlo != zsz)
            throw InconsistentOrder("z-set not consecutive in order");
        if (shi - slo != child_sz + zsz)
            throw InconsistentOrder("subtree not contiguous in order");
        if (zsz > 0 && zhi != shi)
            throw InconsistentOrder("z-set must follow its descendants");
        ti.z_lo[t] = zsz ? zlo : shi;
        ti.z_hi[t] = zsz ? zhi : shi;
        ti.sub_lo[t] = slo;
        ti.sub_hi[t] = shi;
    }
    return ti;
}

}  // namespace

NdResult nested_dissection_lu(const FieldMatrix& a, const ZTree& tree,
                              const std::vector<int>& order, const NdOptions& opts) {
    if (a.rows() != a.cols()) throw Error("nested_dissection_lu: square matrix required");
    const std::size_t m = a.rows();
    const PrimeField& f = a.field();
    const TreeIndex ti = index_tree(tree, order, m);
    const std::size_t prefix =
        opts.eliminate_prefix < 0 ? m : static_cast<std::size_t>(opts.eliminate_prefix);

    // Pattern locality check and B_t accumulation from the original pattern.
    std::vector<std::vector<int>> bsets(tree.nodes.size());
    {
        std::vector<int> node_at(m);
        for (std::size_t i = 0; i < m; ++i)
            node_at[i] = ti.node_of[static_cast<std::size_t>(order[i])];
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint64_t* ri = a.row(i);
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j || ri[j] == 0) continue;
                const int tl = node_at[i];
                const int th = node_at[j];
                if (tl == th) continue;
                // An entry joining a descendant to an ancestor puts the
                // ancestor position into B_t for every node on the path from
                // the descendant's node up to just below the ancestor's,
                // whichever triangle the entry lives in.
                if (ti.is_ancestor(th, tl)) {
                    for (int t = tl; t != th; t = ti.parent[t])
                        bsets[static_cast<std::size_t>(t)].push_back(static_cast<int>(j));
                } else if (ti.is_ancestor(tl, th)) {
                    for (int t = th; t != tl; t = ti.parent[t])
                        bsets[static_cast<std::size_t>(t)].push_back(static_cast<int>(i));
                } else {
                    throw InconsistentOrder("pattern nonzero joins unrelated subtrees");
                }
            }
        }
        for (auto& b : bsets) {
            std::sort(b.begin(), b.end());
            b.erase(std::unique(b.begin(), b.end()), b.end());
        }
    }

    NdResult res;
    res.lu = a;
    FieldMatrix& mtx = res.lu;
    std::vector<char> in_window(m, 0);
    std::vector<std::size_t> window;
    std::vector<std::uint64_t> sub;

    // Nodes in post order.
    std::vector<int> nodes_post;
    {
        std::vector<std::pair<int, bool>> stack{{tree.root, false}};
        while (!stack.empty()) {
            auto [t, expanded] = stack.back();
            stack.pop_back();
            if (expanded) {
                nodes_post.push_back(t);
                continue;
            }
            stack.push_back({t, true});
            for (const int ch : {tree.nodes[t].right, tree.nodes[t].left})
                if (ch >= 0) stack.push_back({ch, false});
        }
    }

    for (const int t : nodes_post) {
        const std::size_t lo = ti.z_lo[static_cast<std::size_t>(t)];
        const std::size_t hi = ti.z_hi[static_cast<std::size_t>(t)];
        if (lo >= hi) continue;
        const std::size_t npiv = prefix <= lo ? 0 : std::min(prefix, hi) - lo;
        window.clear();
        for (std::size_t q = lo; q < hi; ++q) window.push_back(q);
        for (const int b : bsets[static_cast<std::size_t>(t)])
            window.push_back(static_cast<std::size_t>(b));
        const std::size_t w = window.size();
        res.stats.nodes += 1;
        res.stats.max_window = std::max(res.stats.max_window, w);
        if (npiv == 0) continue;

        for (const std::size_t q : window) in_window[q] = 1;
        if (opts.instrument) {
            // Factors are stored in place, so positions before lo hold L
            // multipliers and U entries of rows already eliminated.  Only
            // active entries, at or past the frontier, can break locality.
            for (std::size_t x = 0; x < npiv; ++x) {
                const std::size_t r = window[x];
                const std::uint64_t* rr = mtx.row(r);
                for (std::size_t j = lo; j < m; ++j)
                    if (rr[j] != 0 && !in_window[j]) ++res.stats.locality_violations;
                for (std::size_t i = lo; i < m; ++i)
                    if (mtx.at(i, r) != 0 && !in_window[i]) ++res.stats.locality_violations;
            }
        }

        // Work on the dense window submatrix.
        sub.assign(w * w, 0);
        for (std::size_t x = 0; x < w; ++x) {
            const std::uint64_t* src = mtx.row(window[x]);
            for (std::size_t y = 0; y < w; ++y) sub[x * w + y] = src[window[y]];
        }
        for (std::size_t d = 0; d < npiv; ++d) {
            const std::uint64_t piv = sub[d * w + d];
            if (piv == 0) {
                if (opts.on_zero_pivot == ZeroPivotPolicy::Throw)
                    throw ZeroPivot(window[d]);
                // Earlier columns of the window hold L multipliers and U
                // entries, not Schur data; only the trailing part decides.
                for (std::size_t y = d; y < w; ++y)
                    if (sub[d * w + y] != 0 || sub[y * w + d] != 0)
                        throw RankMismatch("zero pivot with nonzero row or column at position " +
                                           std::to_string(window[d]));
                res.deleted.push_back(static_cast<int>(window[d]));
                continue;
            }
            const std::uint64_t inv = f.inv(piv);
            for (std::size_t x = d + 1; x < w; ++x) {
                const std::uint64_t head = sub[x * w + d];
                if (head == 0) continue;
                const std::uint64_t fac = f.mul(head, inv);
                sub[x * w + d] = fac;
                const std::uint64_t fr = f.ready(fac);
                std::uint64_t* rx = sub.data() + x * w;
                const std::uint64_t* rd = sub.data() + d * w;
                for (std::size_t y = d + 1; y < w; ++y)
                    rx[y] = f.sub(rx[y], f.mul_ready(fr, rd[y]));
            }
        }
        for (std::size_t x = 0; x < w; ++x) {
            std::uint64_t* dst = mtx.row(window[x]);
            for (std::size_t y = 0; y < w; ++y) dst[window[y]] = sub[x * w + y];
        }
        for (const std::size_t q : window) in_window[q] = 0;
    }
    return res;
}

}  // namespace geomatch
