#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "geomatch/errors.hpp"
#include "geomatch/generate.hpp"
#include "geomatch/geometry.hpp"

using namespace geomatch;

namespace {

bool same_objects(const GeomObject& a, const GeomObject& b) {
    return a.kind == b.kind && a.a.x == b.a.x && a.a.y == b.a.y &&
           a.b.x == b.b.x && a.b.y == b.b.y && a.r == b.r;
}

}  // namespace

TEST_CASE("all families and regimes produce valid normalized instances") {
    for (ShapeFamily shape : {ShapeFamily::UnitDisk, ShapeFamily::DiskRatio, ShapeFamily::Box}) {
        for (Regime regime : {Regime::LowDensity, Regime::Clustered}) {
            GeneratorSpec spec;
            spec.shape = shape;
            spec.psi = shape == ShapeFamily::UnitDisk ? 1.0 : 2.5;
            spec.n = 120;
            spec.regime = regime;
            spec.target = 6.0;
            const Instance inst = generate(spec, 97);
            CHECK(inst.objects.size() == 120);
            CHECK_NOTHROW(validate_instance(inst));
        }
    }
}

TEST_CASE("instance psi reflects the family") {
    GeneratorSpec spec;
    spec.n = 20;

    spec.shape = ShapeFamily::UnitDisk;
    CHECK(generate(spec, 1).params.psi == 2.0);

    spec.shape = ShapeFamily::DiskRatio;
    spec.psi = 3.0;
    CHECK(generate(spec, 1).params.psi == 6.0);

    spec.shape = ShapeFamily::Box;
    spec.psi = 3.0;
    CHECK(generate(spec, 1).params.psi == 3.0);
}

TEST_CASE("generation is a pure function of spec and seed") {
    GeneratorSpec spec;
    spec.shape = ShapeFamily::DiskRatio;
    spec.psi = 2.0;
    spec.n = 90;
    spec.target = 5.0;
    const Instance a = generate(spec, 12345);
    const Instance b = generate(spec, 12345);
    const Instance c = generate(spec, 12346);
    REQUIRE(a.objects.size() == b.objects.size());
    for (std::size_t i = 0; i < a.objects.size(); ++i)
        CHECK(same_objects(a.objects[i], b.objects[i]));
    bool all_same = c.objects.size() == a.objects.size();
    if (all_same)
        for (std::size_t i = 0; i < a.objects.size(); ++i)
            all_same = all_same && same_objects(a.objects[i], c.objects[i]);
    CHECK_FALSE(all_same);
}

TEST_CASE("low-density instances respect the density target") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GeneratorSpec spec;
        spec.shape = seed % 2 ? ShapeFamily::UnitDisk : ShapeFamily::Box;
        spec.psi = seed % 2 ? 1.0 : 2.0;
        spec.n = 150;
        spec.target = 6.0;
        const Instance inst = generate(spec, 500 + seed);
        CHECK(density_estimate(inst.objects) <= 6.0);
    }
}

TEST_CASE("clustered instances reach the requested depth") {
    for (ShapeFamily shape : {ShapeFamily::UnitDisk, ShapeFamily::DiskRatio, ShapeFamily::Box}) {
        GeneratorSpec spec;
        spec.shape = shape;
        spec.psi = shape == ShapeFamily::UnitDisk ? 1.0 : 2.0;
        spec.n = 100;
        spec.regime = Regime::Clustered;
        spec.target = 10.0;
        const Instance inst = generate(spec, 777);
        // Clusters are dealt round-robin and the jitter keeps one cluster
        // around a common point, so the largest cluster is a depth witness.
        const int k = std::max(1, static_cast<int>(std::llround(spec.n / spec.target)));
        const int biggest = (spec.n + k - 1) / k;
        CHECK(depth(inst.objects) >= biggest);
    }
}

TEST_CASE("a pinned region that cannot fit the target fails loudly") {
    setenv("GEOMATCH_MAX_RETRIES", "3", 1);
    GeneratorSpec spec;
    spec.n = 300;
    spec.target = 2.0;
    spec.region = 6.0;  // 300 unit disks in a 6x6 square: density far over 2
    CHECK_THROWS_AS(generate(spec, 9), GenerationFailed);
    unsetenv("GEOMATCH_MAX_RETRIES");
}

TEST_CASE("bad generator parameters are rejected") {
    GeneratorSpec spec;
    spec.n = -1;
    CHECK_THROWS_AS(generate(spec, 1), BadInstance);

    spec.n = 10;
    spec.shape = ShapeFamily::Box;
    spec.psi = 0.5;
    CHECK_THROWS_AS(generate(spec, 1), BadInstance);

    spec.psi = 2.0;
    spec.target = 0.0;
    CHECK_THROWS_AS(generate(spec, 1), BadInstance);
}

TEST_CASE("empty request yields an empty instance") {
    GeneratorSpec spec;
    spec.n = 0;
    const Instance inst = generate(spec, 3);
    CHECK(inst.objects.empty());
    CHECK(inst.params.psi == 2.0);
}

TEST_CASE("family and regime names round-trip") {
    for (ShapeFamily s : {ShapeFamily::UnitDisk, ShapeFamily::DiskRatio, ShapeFamily::Box}) {
        const auto parsed = parse_shape(shape_name(s));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == s);
    }
    CHECK_FALSE(parse_shape("pentagon").has_value());
    CHECK(parse_regime("low-density") == Regime::LowDensity);
    CHECK(parse_regime("clustered") == Regime::Clustered);
    CHECK_FALSE(parse_regime("dense").has_value());
}
