#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "geomatch/geometry.hpp"
#include "geomatch/graph.hpp"
#include "geomatch/matching.hpp"
#include "geomatch/separator.hpp"
#include "geomatch/sparsify.hpp"

namespace geomatch {

enum class RunMode { Algebraic, SparsifyAlgebraic, SparsifyBlossom, Blossom };

std::string mode_name(RunMode m);
std::optional<RunMode> parse_mode(const std::string& name);

struct RunConfig {
    RunMode mode = RunMode::Blossom;
    std::uint64_t seed = 1;
    bool verify = false;
    StructureKind structure = StructureKind::Naive;
    bool zero_times = false;          // reproducible byte-identical reports
    bool keep_decomposition = false;  // retain the separator tree for dumps
    std::string instance_id = "instance";
};

struct RunReport {
    std::string instance_id;
    std::string mode;
    int n = 0;
    std::size_t edges = 0;
    int depth = 0;
    double density_est = 0.0;
    double psi = 1.0;
    Matching matching;
    bool valid = false;
    long long oracle_size = -1;  // -1 when verification was off
    bool oracle_match = true;
    double build_ms = 0.0, sparsify_ms = 0.0, match_ms = 0.0, verify_ms = 0.0;
    std::uint64_t seed = 0;
    std::optional<SeparatorTreeResult> decomposition;
    std::optional<SparsifierResult> sparsifier;
};

// Runs one instance through the selected pipeline, always validates the
// resulting matching against the instance graph, and compares with the exact
// oracle under cfg.verify.  GEOMATCH_MAX_RETRIES overrides the separator
// retry budget.
RunReport run_pipeline(const Instance& inst, const RunConfig& cfg);

}  // namespace geomatch
