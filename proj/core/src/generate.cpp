#include "geomatch/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "geomatch/errors.hpp"
#include "geomatch/rng.hpp"

namespace geomatch {

namespace {

int retry_cap() {
    if (const char* s = std::getenv("GEOMATCH_MAX_RETRIES")) {
        int v = std::atoi(s);
        if (v > 0) return v;
    }
    return 64;
}

// Largest extent an object of the family can have, for region sizing and
// cluster jitter.
double family_scale(const GeneratorSpec& spec) {
    switch (spec.shape) {
        case ShapeFamily::UnitDisk: return 2.0;
        case ShapeFamily::DiskRatio: return 2.0 * spec.psi;
        case ShapeFamily::Box: return spec.psi;
    }
    return 2.0;
}

Vec2 jittered(Vec2 center, double j, Rng& rng) {
    while (true) {
        Vec2 d{rng.uniform(-j, j), rng.uniform(-j, j)};
        if (sqnorm(d) <= j * j) return center + d;
    }
}

GeomObject sample_object(const GeneratorSpec& spec, Vec2 pos, Rng& rng) {
    switch (spec.shape) {
        case ShapeFamily::UnitDisk:
            return make_unit_disk(pos.x, pos.y);
        case ShapeFamily::DiskRatio:
            return make_disk(pos.x, pos.y, rng.uniform(1.0, spec.psi));
        case ShapeFamily::Box: {
            double w = rng.uniform(1.0, spec.psi);
            double h = rng.uniform(1.0, spec.psi);
            return make_box(pos.x, pos.y, pos.x + w, pos.y + h);
        }
    }
    throw Error("sample_object: bad shape");
}

std::vector<GeomObject> sample_family(const GeneratorSpec& spec, double side, Rng& rng) {
    std::vector<GeomObject> out;
    out.reserve(static_cast<std::size_t>(spec.n));
    if (spec.regime == Regime::LowDensity) {
        for (int i = 0; i < spec.n; ++i) {
            Vec2 pos{rng.uniform(0.0, side), rng.uniform(0.0, side)};
            out.push_back(sample_object(spec, pos, rng));
        }
        return out;
    }
    // Clustered: uniform ("Poisson-like") cluster centers, objects dealt
    // round-robin with a jitter small enough that one cluster stays mutually
    // intersecting, so the local depth tracks the cluster size.
    int k = std::max(1, static_cast<int>(std::llround(spec.n / std::max(1.0, spec.target))));
    std::vector<Vec2> centers;
    centers.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        centers.push_back(Vec2{rng.uniform(0.0, side), rng.uniform(0.0, side)});
    double j = spec.shape == ShapeFamily::Box ? 0.5 : 1.0;
    for (int i = 0; i < spec.n; ++i) {
        Vec2 pos = jittered(centers[static_cast<std::size_t>(i % k)], j, rng);
        out.push_back(sample_object(spec, pos, rng));
    }
    return out;
}

}  // namespace

Instance generate(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.n < 0) throw BadInstance("generate: negative n");
    if (spec.shape != ShapeFamily::UnitDisk && spec.psi < 1.0)
        throw BadInstance("generate: size ratio must be >= 1");
    if (spec.target <= 0.0) throw BadInstance("generate: target must be positive");

    Instance inst;
    switch (spec.shape) {
        case ShapeFamily::UnitDisk: inst.params.psi = 2.0; break;
        case ShapeFamily::DiskRatio: inst.params.psi = 2.0 * spec.psi; break;
        case ShapeFamily::Box: inst.params.psi = spec.psi; break;
    }
    if (spec.n == 0) return inst;

    const double scale = family_scale(spec);
    const bool autosized = spec.region <= 0.0;
    double side = spec.region;
    if (autosized) {
        // Low density: a probe of the family scale sees about
        // pi * scale^2 * n / side^2 objects, so this keeps the estimate
        // under the target with margin.  Clustered: spacing of about two
        // scales between cluster centers.
        double spread = spec.regime == Regime::LowDensity
                            ? 2.5 * std::sqrt(spec.n / std::max(1.0, spec.target))
                            : 2.0 * std::sqrt(std::max(1.0, spec.n / std::max(1.0, spec.target)));
        side = std::max(4.0 * scale, scale * spread);
    }

    Rng rng(seed);
    const int cap = retry_cap();
    for (int attempt = 0; attempt < cap; ++attempt) {
        inst.objects = sample_family(spec, side, rng);
        if (spec.regime == Regime::Clustered ||
            density_estimate(inst.objects) <= spec.target) {
            validate_instance(inst);
            return inst;
        }
        // An unlucky draw can exceed the target at any fixed size, so when the
        // region was not pinned by the caller, widen it a little each retry.
        if (autosized) side *= 1.1;
    }
    throw GenerationFailed("generate: density target not reached; grow the region or the target");
}

std::optional<ShapeFamily> parse_shape(const std::string& name) {
    if (name == "unit-disk") return ShapeFamily::UnitDisk;
    if (name == "disk-ratio") return ShapeFamily::DiskRatio;
    if (name == "box") return ShapeFamily::Box;
    return std::nullopt;
}

std::optional<Regime> parse_regime(const std::string& name) {
    if (name == "low-density") return Regime::LowDensity;
    if (name == "clustered") return Regime::Clustered;
    return std::nullopt;
}

std::string shape_name(ShapeFamily s) {
    switch (s) {
        case ShapeFamily::UnitDisk: return "unit-disk";
        case ShapeFamily::DiskRatio: return "disk-ratio";
        case ShapeFamily::Box: return "box";
    }
    return "unit-disk";
}

}  // namespace geomatch
