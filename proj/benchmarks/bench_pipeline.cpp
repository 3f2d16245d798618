#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <vector>

#include "geomatch/blossom.hpp"
#include "geomatch/field_matrix.hpp"
#include "geomatch/generate.hpp"
#include "geomatch/graph.hpp"
#include "geomatch/matching.hpp"
#include "geomatch/modular.hpp"
#include "geomatch/rng.hpp"
#include "geomatch/separator.hpp"
#include "geomatch/sparsify.hpp"

using namespace geomatch;

namespace {

// One instance per size, shared across benchmarks so comparisons see the
// same inputs.
const Instance& unit_disk_instance(int n) {
    static std::map<int, Instance> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        GeneratorSpec spec;
        spec.n = n;
        spec.target = 6.0;
        it = cache.emplace(n, generate(spec, 90000 + static_cast<std::uint64_t>(n))).first;
    }
    return it->second;
}

const Instance& box_instance(int n) {
    static std::map<int, Instance> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        GeneratorSpec spec;
        spec.shape = ShapeFamily::Box;
        spec.psi = 1.0;
        spec.n = n;
        spec.target = 8.0;
        it = cache.emplace(n, generate(spec, 91000 + static_cast<std::uint64_t>(n))).first;
    }
    return it->second;
}

void BM_BuildGraph(benchmark::State& state) {
    const Instance& inst = unit_disk_instance(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_graph(inst.objects));
}

void BM_SeparatorTree(benchmark::State& state) {
    const Instance& inst = unit_disk_instance(static_cast<int>(state.range(0)));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        Rng rng(seed++);
        benchmark::DoNotOptimize(build_separator_tree(inst.objects, SeparatorParams{}, rng));
    }
}

void BM_BlossomMatching(benchmark::State& state) {
    const Instance& inst = unit_disk_instance(static_cast<int>(state.range(0)));
    const IntersectionGraph g = build_graph(inst.objects);
    for (auto _ : state) benchmark::DoNotOptimize(blossom_maximum_matching(g));
}

void BM_AlgebraicMatching(benchmark::State& state) {
    const Instance& inst = unit_disk_instance(static_cast<int>(state.range(0)));
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            algebraic_maximum_matching(inst.objects, seed++, AlgebraicOptions{}));
}

void BM_Sparsify(benchmark::State& state) {
    const Instance& inst = unit_disk_instance(static_cast<int>(state.range(0)));
    const auto kind = static_cast<StructureKind>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(sparsify(inst.objects, inst.params.psi, kind));
}

void BM_SparsifyBoxes(benchmark::State& state) {
    const Instance& inst = box_instance(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sparsify(inst.objects, inst.params.psi, StructureKind::Naive));
}

void BM_TreeScheduledElimination(benchmark::State& state) {
    const Instance& inst = unit_disk_instance(static_cast<int>(state.range(0)));
    Rng rng(3);
    const SeparatorTreeResult built =
        build_separator_tree(inst.objects, SeparatorParams{}, rng);
    const IntersectionGraph& g = built.split.graph;
    const std::vector<int> order = post_order_permutation(built.tree.tree);
    const PrimeField f(2147483659ull);
    const auto m = static_cast<std::size_t>(g.n);
    std::vector<std::size_t> pos(m);
    for (std::size_t i = 0; i < m; ++i) pos[static_cast<std::size_t>(order[i])] = i;
    FieldMatrix a(m, m, f);
    for (std::size_t i = 0; i < m; ++i) a.at(i, i) = 1 + rng.next_u64() % (f.p() - 1);
    for (int v = 0; v < g.n; ++v)
        for (int u : g.adj[v])
            a.at(pos[static_cast<std::size_t>(v)], pos[static_cast<std::size_t>(u)]) =
                rng.next_u64() % f.p();

    NdOptions opts;
    opts.instrument = state.range(1) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(nested_dissection_lu(a, built.tree.tree, order, opts));
    state.counters["m"] = static_cast<double>(m);
}

}  // namespace

BENCHMARK(BM_BuildGraph)->Arg(200)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparatorTree)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlossomMatching)->Arg(200)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AlgebraicMatching)->Arg(100)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sparsify)
    ->Args({1000, 0})
    ->Args({1000, 1})
    ->Args({4000, 0})
    ->Args({4000, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparsifyBoxes)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TreeScheduledElimination)
    ->Args({300, 0})
    ->Args({300, 1})
    ->Args({800, 0})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
