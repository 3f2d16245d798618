#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "geomatch/errors.hpp"
#include "geomatch/generate.hpp"
#include "geomatch/instance_io.hpp"
#include "geomatch/run.hpp"

using namespace geomatch;

namespace {

std::string path_stem(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = name.find_last_of('.');
    return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum matchings in geometric intersection graphs"};

    std::string mode_s = "blossom";
    std::string generator_s = "unit-disk";
    std::string regime_s = "low-density";
    std::string structure_s = "naive";
    std::string format_s = "json";
    std::string instance_path, out_path, instance_id;
    std::string dump_tree, dump_sparsifier, dump_matching, save_instance_path;
    std::uint64_t seed = 1;
    int n = 100;
    double psi = 1.0, target = 8.0, region = 0.0;
    bool verify = false, zero_times = false;

    app.add_option("--mode", mode_s,
                   "algebraic | sparsify-then-algebraic | sparsify-then-blossom | blossom");
    app.add_option("--seed", seed, "seed; fully determines the run");
    app.add_option("--n", n, "generated instance size");
    app.add_option("--psi", psi, "size ratio for the disk-ratio and box generators");
    app.add_option("--generator", generator_s, "unit-disk | disk-ratio | box");
    app.add_option("--regime", regime_s, "low-density | clustered");
    app.add_option("--target", target, "density target (low-density) or depth target (clustered)");
    app.add_option("--region", region, "region side length; 0 picks one from n and target");
    app.add_option("--instance", instance_path, "instance JSON file (overrides the generator)");
    app.add_flag("--verify", verify, "cross-check against the exact oracle; mismatch exits 2");
    app.add_option("--out", out_path, "report file; stdout when omitted");
    app.add_option("--format", format_s, "json | csv");
    app.add_option("--structure", structure_s, "naive | unit-disk cluster query structure");
    app.add_option("--id", instance_id, "instance id used in reports");
    app.add_option("--dump-tree", dump_tree, "write the separator tree as JSON");
    app.add_option("--dump-sparsifier", dump_sparsifier, "write kept ids and residuals as JSON");
    app.add_option("--dump-matching", dump_matching, "write the matching as JSON pairs");
    app.add_option("--save-instance", save_instance_path, "write the instance as JSON");
    app.add_flag("--zero-times", zero_times, "report zero stage times (byte-identical reruns)");
    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        auto mode = parse_mode(mode_s);
        if (!mode) throw Error("unknown mode: " + mode_s);
        cfg.mode = *mode;
        cfg.seed = seed;
        cfg.verify = verify;
        cfg.zero_times = zero_times;
        cfg.keep_decomposition = !dump_tree.empty();
        if (structure_s == "naive") {
            cfg.structure = StructureKind::Naive;
        } else if (structure_s == "unitdisk" || structure_s == "unit-disk") {
            cfg.structure = StructureKind::UnitDisk;
        } else {
            throw Error("unknown structure: " + structure_s);
        }
        if (format_s != "json" && format_s != "csv")
            throw Error("unknown format: " + format_s);

        Instance inst;
        if (!instance_path.empty()) {
            inst = load_instance(instance_path);
            cfg.instance_id = instance_id.empty() ? path_stem(instance_path) : instance_id;
        } else {
            GeneratorSpec spec;
            auto shape = parse_shape(generator_s);
            if (!shape) throw Error("unknown generator: " + generator_s);
            auto regime = parse_regime(regime_s);
            if (!regime) throw Error("unknown regime: " + regime_s);
            spec.shape = *shape;
            spec.regime = *regime;
            spec.n = n;
            spec.psi = psi;
            spec.target = target;
            spec.region = region;
            inst = generate(spec, seed);
            cfg.instance_id = instance_id.empty()
                                  ? shape_name(*shape) + "-n" + std::to_string(n) + "-s" +
                                        std::to_string(seed)
                                  : instance_id;
        }
        if (!save_instance_path.empty()) save_instance(inst, save_instance_path);

        RunReport rep = run_pipeline(inst, cfg);

        if (!dump_matching.empty()) write_text_file(dump_matching, matching_to_json(rep.matching));
        if (!dump_tree.empty()) {
            if (rep.decomposition) {
                write_text_file(dump_tree, tree_to_json(rep.decomposition->tree));
            } else {
                Rng rng(cfg.seed);
                auto sres = build_separator_tree(inst.objects, SeparatorParams{}, rng);
                write_text_file(dump_tree, tree_to_json(sres.tree));
            }
        }
        if (!dump_sparsifier.empty()) {
            if (rep.sparsifier) {
                write_text_file(dump_sparsifier, sparsifier_to_json(*rep.sparsifier));
            } else {
                write_text_file(dump_sparsifier,
                                sparsifier_to_json(
                                    sparsify(inst.objects, inst.params.psi, cfg.structure)));
            }
        }

        const RunReport rows[] = {rep};
        std::string text = format_s == "csv" ? report_to_csv(rows) : report_to_json(rows);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            write_text_file(out_path, text);
        }

        if (verify && !rep.oracle_match) {
            std::fprintf(stderr, "oracle mismatch: matched %zu, oracle %lld\n",
                         rep.matching.size(), rep.oracle_size);
            return 2;
        }
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
