#include "geomatch/run.hpp"

#include <chrono>
#include <cstdlib>
#include <utility>

#include "geomatch/blossom.hpp"
#include "geomatch/errors.hpp"

namespace geomatch {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int env_retries() {
    if (const char* s = std::getenv("GEOMATCH_MAX_RETRIES")) {
        int v = std::atoi(s);
        if (v > 0) return v;
    }
    return -1;
}

Matching map_pairs(const Matching& local, const std::vector<int>& to_parent) {
    Matching out;
    out.pairs.reserve(local.pairs.size());
    for (auto [u, v] : local.pairs)
        out.pairs.emplace_back(to_parent[static_cast<std::size_t>(u)],
                               to_parent[static_cast<std::size_t>(v)]);
    return out;
}

}  // namespace

std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::Algebraic: return "algebraic";
        case RunMode::SparsifyAlgebraic: return "sparsify-then-algebraic";
        case RunMode::SparsifyBlossom: return "sparsify-then-blossom";
        case RunMode::Blossom: return "blossom";
    }
    return "blossom";
}

std::optional<RunMode> parse_mode(const std::string& name) {
    if (name == "algebraic") return RunMode::Algebraic;
    if (name == "sparsify-then-algebraic") return RunMode::SparsifyAlgebraic;
    if (name == "sparsify-then-blossom") return RunMode::SparsifyBlossom;
    if (name == "blossom") return RunMode::Blossom;
    return std::nullopt;
}

RunReport run_pipeline(const Instance& inst, const RunConfig& cfg) {
    RunReport rep;
    rep.instance_id = cfg.instance_id;
    rep.mode = mode_name(cfg.mode);
    rep.n = static_cast<int>(inst.objects.size());
    rep.psi = inst.params.psi;
    rep.seed = cfg.seed;

    auto t0 = Clock::now();
    IntersectionGraph g = build_graph(inst.objects);
    rep.edges = g.edge_count;
    rep.depth = depth(inst.objects);
    rep.density_est = density_estimate(inst.objects);
    rep.build_ms = ms_since(t0);

    AlgebraicOptions opts;
    if (int r = env_retries(); r > 0) opts.sep.max_retries = r;
    opts.keep_split = cfg.keep_decomposition;

    Matching m;
    switch (cfg.mode) {
        case RunMode::Blossom: {
            t0 = Clock::now();
            m = blossom_maximum_matching(g);
            rep.match_ms = ms_since(t0);
            break;
        }
        case RunMode::Algebraic: {
            t0 = Clock::now();
            AlgebraicResult res = algebraic_maximum_matching(inst.objects, cfg.seed, opts);
            rep.match_ms = ms_since(t0);
            m = std::move(res.matching);
            if (cfg.keep_decomposition) rep.decomposition = std::move(res.decomposition);
            break;
        }
        case RunMode::SparsifyBlossom: {
            t0 = Clock::now();
            SparsifierResult sp = sparsify(inst.objects, inst.params.psi, cfg.structure);
            rep.sparsify_ms = ms_since(t0);
            t0 = Clock::now();
            SubgraphResult sub = induced_subgraph(g, sp.kept);
            Matching kept = map_pairs(blossom_maximum_matching(sub.graph), sub.to_parent);
            m = combine_matchings(kept, sp.residuals);
            rep.match_ms = ms_since(t0);
            rep.sparsifier = std::move(sp);
            break;
        }
        case RunMode::SparsifyAlgebraic: {
            t0 = Clock::now();
            SparsifierResult sp = sparsify(inst.objects, inst.params.psi, cfg.structure);
            rep.sparsify_ms = ms_since(t0);
            t0 = Clock::now();
            std::vector<GeomObject> sub_objects;
            sub_objects.reserve(sp.kept.size());
            for (int id : sp.kept) sub_objects.push_back(inst.objects[static_cast<std::size_t>(id)]);
            AlgebraicResult res = algebraic_maximum_matching(sub_objects, cfg.seed, opts);
            Matching kept = map_pairs(res.matching, sp.kept);
            m = combine_matchings(kept, sp.residuals);
            rep.match_ms = ms_since(t0);
            rep.sparsifier = std::move(sp);
            if (cfg.keep_decomposition) rep.decomposition = std::move(res.decomposition);
            break;
        }
    }

    validate_matching(g, m);
    rep.valid = true;
    rep.matching = std::move(m);

    if (cfg.verify) {
        t0 = Clock::now();
        Matching oracle = blossom_maximum_matching(g);
        rep.oracle_size = static_cast<long long>(oracle.size());
        rep.oracle_match = oracle.size() == rep.matching.size();
        rep.verify_ms = ms_since(t0);
    }
    if (cfg.zero_times) {
        rep.build_ms = rep.sparsify_ms = rep.match_ms = rep.verify_ms = 0.0;
    }
    return rep;
}

}  // namespace geomatch
