#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "geomatch/geometry.hpp"

namespace geomatch {

enum class ShapeFamily { UnitDisk, DiskRatio, Box };
enum class Regime { LowDensity, Clustered };

// psi is the size ratio: disk radii in [1, psi] (instance psi 2*psi) or box
// sides in [1, psi] (instance psi = psi).  Unit disks ignore it (instance
// psi 2).  target is a density bound (LowDensity resamples until
// density_estimate fits) or a rough per-cluster depth (Clustered).  region 0
// picks a side from n and target.
struct GeneratorSpec {
    ShapeFamily shape = ShapeFamily::UnitDisk;
    double psi = 1.0;
    int n = 0;
    Regime regime = Regime::LowDensity;
    double target = 8.0;
    double region = 0.0;
};

Instance generate(const GeneratorSpec& spec, std::uint64_t seed);

std::optional<ShapeFamily> parse_shape(const std::string& name);
std::optional<Regime> parse_regime(const std::string& name);
std::string shape_name(ShapeFamily s);

}  // namespace geomatch
