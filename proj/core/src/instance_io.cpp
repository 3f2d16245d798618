#include "geomatch/instance_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "geomatch/errors.hpp"

namespace geomatch {

using nlohmann::json;

std::string instance_to_json(const Instance& inst) {
    json objs = json::array();
    for (const GeomObject& o : inst.objects) {
        if (o.kind == ShapeKind::Box) {
            objs.push_back({{"kind", "box"},
                            {"x0", o.a.x},
                            {"y0", o.a.y},
                            {"x1", o.b.x},
                            {"y1", o.b.y}});
        } else {
            objs.push_back({{"kind", "disk"}, {"cx", o.a.x}, {"cy", o.a.y}, {"r", o.r}});
        }
    }
    json doc{{"psi", inst.params.psi}, {"objects", std::move(objs)}};
    return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw BadInstance(std::string("instance parse: ") + e.what());
    }
    try {
        Instance inst;
        inst.params.psi = doc.at("psi").get<double>();
        for (const json& j : doc.at("objects")) {
            std::string kind = j.at("kind").get<std::string>();
            if (kind == "disk") {
                inst.objects.push_back(make_disk(j.at("cx").get<double>(),
                                                 j.at("cy").get<double>(),
                                                 j.at("r").get<double>()));
            } else if (kind == "box") {
                inst.objects.push_back(make_box(j.at("x0").get<double>(),
                                                j.at("y0").get<double>(),
                                                j.at("x1").get<double>(),
                                                j.at("y1").get<double>()));
            } else {
                throw BadInstance("instance parse: unknown kind " + kind);
            }
        }
        return inst;
    } catch (const json::exception& e) {
        throw BadInstance(std::string("instance parse: ") + e.what());
    }
}

Instance load_instance(const std::string& path) { return instance_from_json(read_text_file(path)); }

void save_instance(const Instance& inst, const std::string& path) {
    write_text_file(path, instance_to_json(inst));
}

std::string matching_to_json(const Matching& m) {
    json arr = json::array();
    for (auto [u, v] : m.pairs) arr.push_back({u, v});
    return arr.dump() + "\n";
}

std::string tree_to_json(const SeparatorTree& t) {
    json nodes = json::array();
    for (const auto& nd : t.tree.nodes)
        nodes.push_back({{"z", nd.z}, {"left", nd.left}, {"right", nd.right}});
    json doc{{"root", t.tree.root},
             {"gamma", t.params.gamma},
             {"alpha", t.params.alpha},
             {"leaf_size_bound", t.params.leaf_size_bound},
             {"nodes", std::move(nodes)}};
    return doc.dump(2) + "\n";
}

std::string sparsifier_to_json(const SparsifierResult& r) {
    json residuals = json::array();
    for (const auto& [pt, ids] : r.residuals)
        residuals.push_back({{"x", pt.x}, {"y", pt.y}, {"ids", ids}});
    json doc{{"psi", r.psi},
             {"lambda", r.lambda},
             {"kept", r.kept},
             {"residuals", std::move(residuals)}};
    return doc.dump(2) + "\n";
}

namespace {

std::vector<const RunReport*> sorted_rows(std::span<const RunReport> rows) {
    std::vector<const RunReport*> out;
    out.reserve(rows.size());
    for (const RunReport& r : rows) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const RunReport* a, const RunReport* b) {
        return a->instance_id < b->instance_id;
    });
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string report_to_json(std::span<const RunReport> rows) {
    json arr = json::array();
    for (const RunReport* r : sorted_rows(rows)) {
        arr.push_back({{"instance_id", r->instance_id},
                       {"mode", r->mode},
                       {"n", r->n},
                       {"edges", r->edges},
                       {"depth", r->depth},
                       {"density_est", r->density_est},
                       {"psi", r->psi},
                       {"matching_size", r->matching.size()},
                       {"valid", r->valid},
                       {"oracle_size", r->oracle_size},
                       {"oracle_match", r->oracle_match},
                       {"stage_times_ms",
                        {{"build", r->build_ms},
                         {"sparsify", r->sparsify_ms},
                         {"match", r->match_ms},
                         {"verify", r->verify_ms}}},
                       {"seed", r->seed}});
    }
    return arr.dump(2) + "\n";
}

std::string report_to_csv(std::span<const RunReport> rows) {
    std::ostringstream out;
    out << "instance_id,mode,n,edges,depth,density_est,psi,matching_size,oracle_size,"
           "build_ms,sparsify_ms,match_ms,verify_ms,seed\n";
    for (const RunReport* r : sorted_rows(rows)) {
        out << r->instance_id << ',' << r->mode << ',' << r->n << ',' << r->edges << ','
            << r->depth << ',' << fmt_double(r->density_est) << ',' << fmt_double(r->psi)
            << ',' << r->matching.size() << ',' << r->oracle_size << ','
            << fmt_double(r->build_ms) << ',' << fmt_double(r->sparsify_ms) << ','
            << fmt_double(r->match_ms) << ',' << fmt_double(r->verify_ms) << ',' << r->seed
            << '\n';
    }
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error("write failed: " + path);
}

}  // namespace geomatch
