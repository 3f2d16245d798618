#pragma once

#include <span>
#include <string>

#include "geomatch/geometry.hpp"
#include "geomatch/graph.hpp"
#include "geomatch/run.hpp"
#include "geomatch/separator.hpp"
#include "geomatch/sparsify.hpp"

namespace geomatch {

// Instance schema: {"psi": number, "objects": [{"kind":"disk","cx","cy","r"}
// | {"kind":"box","x0","y0","x1","y1"}]}.  Object ids are array positions;
// unit disks serialize as radius-1 disks.  Malformed input throws
// BadInstance.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

// JSON list of index pairs.
std::string matching_to_json(const Matching& m);

// Nodes with z-sets and child links, plus the recorded tree parameters.
std::string tree_to_json(const SeparatorTree& t);

// Kept ids and residual lists keyed by cluster point.
std::string sparsifier_to_json(const SparsifierResult& r);

// Report rows, sorted by instance_id.  CSV columns are fixed:
// instance_id,mode,n,edges,depth,density_est,psi,matching_size,oracle_size,
// build_ms,sparsify_ms,match_ms,verify_ms,seed.
std::string report_to_json(std::span<const RunReport> rows);
std::string report_to_csv(std::span<const RunReport> rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace geomatch
