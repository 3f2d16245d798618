#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "geomatch/blossom.hpp"
#include "geomatch/generate.hpp"
#include "geomatch/instance_io.hpp"
#include "geomatch/run.hpp"
#include "geomatch/separator.hpp"

using namespace geomatch;

namespace {

Instance small_instance(ShapeFamily shape, int n, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.shape = shape;
    spec.psi = shape == ShapeFamily::UnitDisk ? 1.0 : 2.0;
    spec.n = n;
    spec.target = 5.0;
    return generate(spec, seed);
}

}  // namespace

TEST_CASE("every mode finds a maximum matching") {
    const Instance inst = small_instance(ShapeFamily::UnitDisk, 60, 301);
    std::vector<std::size_t> sizes;
    for (RunMode mode : {RunMode::Blossom, RunMode::Algebraic, RunMode::SparsifyBlossom,
                         RunMode::SparsifyAlgebraic}) {
        RunConfig cfg;
        cfg.mode = mode;
        cfg.seed = 7;
        cfg.verify = true;
        const RunReport rep = run_pipeline(inst, cfg);
        CHECK(rep.valid);
        CHECK(rep.oracle_match);
        CHECK(rep.oracle_size == static_cast<long long>(rep.matching.size()));
        CHECK(rep.mode == mode_name(mode));
        CHECK(rep.n == 60);
        CHECK(rep.psi == 2.0);
        CHECK(rep.depth >= 1);
        CHECK(rep.density_est >= 1.0);
        sizes.push_back(rep.matching.size());
    }
    for (std::size_t s : sizes) CHECK(s == sizes.front());
}

TEST_CASE("box instances run through the sparsifying modes") {
    const Instance inst = small_instance(ShapeFamily::Box, 80, 302);
    for (RunMode mode : {RunMode::SparsifyBlossom, RunMode::SparsifyAlgebraic}) {
        RunConfig cfg;
        cfg.mode = mode;
        cfg.seed = 11;
        cfg.verify = true;
        const RunReport rep = run_pipeline(inst, cfg);
        CHECK(rep.valid);
        CHECK(rep.oracle_match);
        REQUIRE(rep.sparsifier.has_value());
        CHECK(rep.sparsifier->psi == inst.params.psi);
    }
}

TEST_CASE("unit-disk query structure slots into the pipeline") {
    const Instance inst = small_instance(ShapeFamily::UnitDisk, 70, 303);
    RunConfig cfg;
    cfg.mode = RunMode::SparsifyBlossom;
    cfg.verify = true;
    cfg.structure = StructureKind::UnitDisk;
    const RunReport rep = run_pipeline(inst, cfg);
    CHECK(rep.valid);
    CHECK(rep.oracle_match);
}

TEST_CASE("verification is off by default") {
    const Instance inst = small_instance(ShapeFamily::UnitDisk, 30, 304);
    RunConfig cfg;
    cfg.mode = RunMode::Blossom;
    const RunReport rep = run_pipeline(inst, cfg);
    CHECK(rep.valid);
    CHECK(rep.oracle_size == -1);
    CHECK(rep.oracle_match);
    CHECK(rep.verify_ms == 0.0);
}

TEST_CASE("kept decompositions pass the structural checks") {
    const Instance inst = small_instance(ShapeFamily::UnitDisk, 90, 305);
    RunConfig cfg;
    cfg.mode = RunMode::Algebraic;
    cfg.keep_decomposition = true;
    cfg.verify = true;
    const RunReport rep = run_pipeline(inst, cfg);
    CHECK(rep.oracle_match);
    REQUIRE(rep.decomposition.has_value());
    CHECK_NOTHROW(validate_tree(rep.decomposition->split.graph, rep.decomposition->tree));
}

TEST_CASE("zeroed timings make reports byte-identical") {
    const Instance inst = small_instance(ShapeFamily::UnitDisk, 50, 306);
    RunConfig cfg;
    cfg.mode = RunMode::SparsifyAlgebraic;
    cfg.seed = 3;
    cfg.verify = true;
    cfg.zero_times = true;
    cfg.instance_id = "repro";
    const RunReport a = run_pipeline(inst, cfg);
    const RunReport b = run_pipeline(inst, cfg);
    const std::vector<RunReport> ra{a}, rb{b};
    CHECK(report_to_json(ra) == report_to_json(rb));
    CHECK(report_to_csv(ra) == report_to_csv(rb));
    CHECK(a.build_ms == 0.0);
    CHECK(a.match_ms == 0.0);
}

TEST_CASE("mode names round-trip") {
    for (RunMode m : {RunMode::Algebraic, RunMode::SparsifyAlgebraic,
                      RunMode::SparsifyBlossom, RunMode::Blossom}) {
        const auto parsed = parse_mode(mode_name(m));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == m);
    }
    CHECK_FALSE(parse_mode("hungarian").has_value());
}

TEST_CASE("empty instances run clean through every mode") {
    Instance inst;
    inst.params.psi = 2.0;
    for (RunMode mode : {RunMode::Blossom, RunMode::Algebraic, RunMode::SparsifyBlossom,
                         RunMode::SparsifyAlgebraic}) {
        RunConfig cfg;
        cfg.mode = mode;
        cfg.verify = true;
        const RunReport rep = run_pipeline(inst, cfg);
        CHECK(rep.valid);
        CHECK(rep.matching.size() == 0);
        CHECK(rep.oracle_match);
    }
}
