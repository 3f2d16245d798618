#include "geomatch/blossom.hpp"

#include <algorithm>
#include <queue>

namespace geomatch {

namespace {

// Augmenting-path search with blossom contraction tracked through base[].
class BlossomSearch {
  public:
    explicit BlossomSearch(const IntersectionGraph& g)
        : g_(g),
          n_(static_cast<std::size_t>(g.n)),
          match_(n_, -1),
          p_(n_),
          base_(n_),
          used_(n_),
          flower_(n_) {}

    std::vector<int> run() {
        // Greedy warm start; the search below only pays for the leftovers.
        for (int v = 0; v < g_.n; ++v) {
            if (match_[static_cast<std::size_t>(v)] != -1) continue;
            for (int u : g_.adj[static_cast<std::size_t>(v)]) {
                if (match_[static_cast<std::size_t>(u)] == -1) {
                    match_[static_cast<std::size_t>(v)] = u;
                    match_[static_cast<std::size_t>(u)] = v;
                    break;
                }
            }
        }
        for (int v = 0; v < g_.n; ++v) {
            if (match_[static_cast<std::size_t>(v)] != -1) continue;
            const int u = find_path(v);
            if (u != -1) augment(u);
        }
        return match_;
    }

  private:
    int lca(int a, int b) {
        std::vector<char> mark(n_, 0);
        int v = a;
        for (;;) {
            v = base_[static_cast<std::size_t>(v)];
            mark[static_cast<std::size_t>(v)] = 1;
            if (match_[static_cast<std::size_t>(v)] == -1) break;
            v = p_[static_cast<std::size_t>(match_[static_cast<std::size_t>(v)])];
        }
        v = b;
        while (!mark[static_cast<std::size_t>(base_[static_cast<std::size_t>(v)])])
            v = p_[static_cast<std::size_t>(match_[static_cast<std::size_t>(v)])];
        return base_[static_cast<std::size_t>(v)];
    }

    void mark_path(int v, int b, int child) {
        while (base_[static_cast<std::size_t>(v)] != b) {
            const int mv = match_[static_cast<std::size_t>(v)];
            flower_[static_cast<std::size_t>(base_[static_cast<std::size_t>(v)])] = 1;
            flower_[static_cast<std::size_t>(base_[static_cast<std::size_t>(mv)])] = 1;
            p_[static_cast<std::size_t>(v)] = child;
            child = mv;
            v = p_[static_cast<std::size_t>(mv)];
        }
    }

    int find_path(int root) {
        std::fill(used_.begin(), used_.end(), 0);
        std::fill(p_.begin(), p_.end(), -1);
        for (std::size_t i = 0; i < n_; ++i) base_[i] = static_cast<int>(i);
        used_[static_cast<std::size_t>(root)] = 1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (const int to : g_.adj[static_cast<std::size_t>(v)]) {
                if (base_[static_cast<std::size_t>(v)] == base_[static_cast<std::size_t>(to)] ||
                    match_[static_cast<std::size_t>(v)] == to)
                    continue;
                if (to == root ||
                    (match_[static_cast<std::size_t>(to)] != -1 &&
                     p_[static_cast<std::size_t>(match_[static_cast<std::size_t>(to)])] != -1)) {
                    // Odd cycle: contract the blossom up to the common base.
                    const int curbase = lca(v, to);
                    std::fill(flower_.begin(), flower_.end(), 0);
                    mark_path(v, curbase, to);
                    mark_path(to, curbase, v);
                    for (std::size_t i = 0; i < n_; ++i)
                        if (flower_[static_cast<std::size_t>(base_[i])]) {
                            base_[i] = curbase;
                            if (!used_[i]) {
                                used_[i] = 1;
                                q.push(static_cast<int>(i));
                            }
                        }
                } else if (p_[static_cast<std::size_t>(to)] == -1) {
                    p_[static_cast<std::size_t>(to)] = v;
                    if (match_[static_cast<std::size_t>(to)] == -1) return to;
                    const int mto = match_[static_cast<std::size_t>(to)];
                    used_[static_cast<std::size_t>(mto)] = 1;
                    q.push(mto);
                }
            }
        }
        return -1;
    }

    void augment(int v) {
        while (v != -1) {
            const int pv = p_[static_cast<std::size_t>(v)];
            const int ppv = match_[static_cast<std::size_t>(pv)];
            match_[static_cast<std::size_t>(v)] = pv;
            match_[static_cast<std::size_t>(pv)] = v;
            v = ppv;
        }
    }

    const IntersectionGraph& g_;
    std::size_t n_;
    std::vector<int> match_, p_, base_;
    std::vector<char> used_, flower_;
};

}  // namespace

Matching blossom_maximum_matching(const IntersectionGraph& g) {
    BlossomSearch search(g);
    const std::vector<int> match = search.run();
    Matching m;
    for (int v = 0; v < g.n; ++v)
        if (match[static_cast<std::size_t>(v)] > v)
            m.pairs.emplace_back(v, match[static_cast<std::size_t>(v)]);
    validate_matching(g, m);
    return m;
}

int exhaustive_matching_size(const IntersectionGraph& g) {
    if (g.n > 16) throw TooLarge("exhaustive matching limited to 16 vertices");
    const int n = g.n;
    std::vector<unsigned> nbr(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v)
        for (const int w : g.adj[static_cast<std::size_t>(v)])
            nbr[static_cast<std::size_t>(v)] |= 1u << w;
    const std::size_t full = std::size_t{1} << n;
    std::vector<signed char> dp(full, 0);
    for (std::size_t mask = 1; mask < full; ++mask) {
        const int v = __builtin_ctzll(mask);
        const std::size_t rest = mask & (mask - 1);  // drop v
        signed char best = dp[rest];
        unsigned cand = nbr[static_cast<std::size_t>(v)] & static_cast<unsigned>(rest);
        while (cand) {
            const int u = __builtin_ctz(cand);
            cand &= cand - 1;
            best = std::max<signed char>(
                best, static_cast<signed char>(1 + dp[rest & ~(std::size_t{1} << u)]));
        }
        dp[mask] = best;
    }
    return dp[full - 1];
}

}  // namespace geomatch
