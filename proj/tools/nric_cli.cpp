// Batch front end for the NRIC shared library. Talks exclusively to the C
// API; all geometry lives behind the opaque handles.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <nric/nric.h>

namespace {

// Exit codes: 0 success/converged, 2 parse error, 3 topology error,
// 4 infeasible input, 5 non-convergence, 6 bad arguments, 7 internal.
int exitCode(nric_status s) {
    switch (s) {
        case NRIC_OK: return 0;
        case NRIC_ERR_PARSE: return 2;
        case NRIC_ERR_TOPOLOGY: return 3;
        case NRIC_ERR_INFEASIBLE: return 4;
        case NRIC_ERR_NOT_CONVERGED: return 5;
        case NRIC_ERR_INVALID_ARGUMENT: return 6;
        default: return 7;
    }
}

struct MeshHandle {
    nric_mesh* p = nullptr;
    ~MeshHandle() { nric_mesh_free(p); }
};
struct CoordsHandle {
    nric_coords* p = nullptr;
    ~CoordsHandle() { nric_coords_free(p); }
};

[[noreturn]] void die(nric_status s, const std::string& context) {
    std::cerr << "error: " << context << ": " << nric_last_error() << "\n";
    std::exit(exitCode(s));
}

void check(nric_status s, const std::string& context) {
    if (s != NRIC_OK) die(s, context);
}

bool hasSuffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

nric_mesh* loadMesh(const std::string& path) {
    nric_mesh* mesh = nullptr;
    check(nric_mesh_load(path.c_str(), &mesh), "loading " + path);
    return mesh;
}

// Coordinates for an input that is either an NRIC file (read against the
// master connectivity) or a mesh file (forward map of its positions).
nric_coords* loadCoords(nric_mesh* master, const std::string& path) {
    nric_coords* coords = nullptr;
    if (hasSuffix(path, ".nric")) {
        check(nric_coords_load(path.c_str(), master, &coords), "loading " + path);
    } else {
        MeshHandle mesh{loadMesh(path)};
        check(nric_coords_from_mesh(mesh.p, &coords), "measuring " + path);
    }
    return coords;
}

void emitReport(char* report, const std::string& reportPath) {
    if (!report) return;
    if (reportPath.empty()) {
        std::cout << report;
    } else {
        std::ofstream out(reportPath);
        out << report;
    }
    nric_string_free(report);
}

struct CommonOptions {
    std::string configPath;
    std::string reportPath;
    double delta = -1.0;
    std::string energy;
    int threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", configPath, "solver/material config file");
        cmd->add_option("--report", reportPath, "write the report here instead of stdout");
        cmd->add_option("--delta", delta, "bending weight (enters squared)");
        cmd->add_option("--energy", energy, "dissimilarity: nonlinear or quadratic")
            ->check(CLI::IsMember({"nonlinear", "quadratic"}));
        cmd->add_option("--threads", threads, "worker cap (0 = library default)");
    }

    nric_options build() const {
        nric_options o;
        nric_options_init(&o);
        if (!configPath.empty())
            check(nric_options_load(configPath.c_str(), &o), "reading " + configPath);
        if (delta >= 0.0) o.delta = delta;
        if (energy == "quadratic") o.energy = NRIC_ENERGY_QUADRATIC;
        else if (energy == "nonlinear") o.energy = NRIC_ENERGY_NONLINEAR;
        if (threads > 0) o.threads = threads;
        return o;
    }
};

nric_tree_strategy parseStrategy(const std::string& s) {
    if (s == "bfs") return NRIC_TREE_BFS;
    if (s == "mst") return NRIC_TREE_MST;
    if (s == "spt") return NRIC_TREE_SPT;
    return NRIC_TREE_PREASSEMBLED;
}

// Reconstruct coords and write OBJ; reports go to stderr-free stdout only when
// requested via verbose pipelines, so just drop the inner report.
void writeShape(nric_mesh* master, nric_coords* coords, const std::string& objPath,
                const std::string& nricPath, nric_tree_strategy strategy, int gnSteps) {
    if (!nricPath.empty())
        check(nric_coords_save(coords, master, nricPath.c_str()), "writing " + nricPath);
    if (objPath.empty()) return;
    nric_mesh* out = nullptr;
    check(nric_reconstruct(master, coords, strategy, gnSteps, nullptr, 0, &out, nullptr),
          "reconstructing " + objPath);
    MeshHandle guard{out};
    check(nric_mesh_save_obj(out, objPath.c_str()), "writing " + objPath);
}

std::vector<int> readSelector(const std::string& path, int expected) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open selector file " << path << "\n";
        std::exit(2);
    }
    std::vector<int> sel;
    int v;
    while (in >> v) sel.push_back(v);
    if (static_cast<int>(sel.size()) != expected) {
        std::cerr << "error: selector has " << sel.size() << " entries, expected "
                  << expected << "\n";
        std::exit(2);
    }
    return sel;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Triangle-mesh optimization in edge lengths and dihedral angles"};
    app.require_subcommand(1);

    // shared state
    std::string meshPath, inputPath, inputBPath, outputPath, outputNricPath;
    std::string constraintPath, strategyName = "mst", selectorPath, outputPrefix;
    std::vector<std::string> inputs, samplePaths;
    std::vector<double> weights;
    int gnSteps = 1, segments = 10;
    bool fixLengths = false;
    CommonOptions common;

    auto* cmdCheck = app.add_subcommand("check", "integrability / admissibility report");
    cmdCheck->add_option("mesh", meshPath, "connectivity + positions (OBJ/OFF)")->required();
    cmdCheck->add_option("--nric", inputPath, "check these coordinates instead");
    common.attach(cmdCheck);

    auto* cmdRigidity = app.add_subcommand("rigidity", "infinitesimal rigidity test");
    cmdRigidity->add_option("mesh", meshPath)->required();
    cmdRigidity->add_option("--nric", inputPath, "coordinates (default: forward map)");
    cmdRigidity->add_option("--selector", selectorPath,
                            "0/1 file over interior edges restricting candidate angles");
    common.attach(cmdRigidity);

    auto* cmdDeform = app.add_subcommand("deform", "constrained deformation");
    cmdDeform->add_option("mesh", meshPath)->required();
    cmdDeform->add_option("--nric", inputPath, "reference coordinates");
    cmdDeform->add_option("--constraints", constraintPath, "fixed-coordinate file");
    cmdDeform->add_option("-o,--output", outputPath, "reconstructed OBJ");
    cmdDeform->add_option("--output-nric", outputNricPath, "solution coordinates");
    cmdDeform->add_option("--strategy", strategyName)->check(
        CLI::IsMember({"bfs", "mst", "spt", "pre"}));
    cmdDeform->add_option("--gn-steps", gnSteps, "refinement steps for reconstruction");
    common.attach(cmdDeform);

    auto* cmdAverage = app.add_subcommand("average", "weighted elastic average");
    cmdAverage->add_option("mesh", meshPath, "connectivity master")->required();
    cmdAverage->add_option("inputs", inputs, "example shapes (OBJ/OFF/NRIC)")->required();
    cmdAverage->add_option("--weights", weights, "one weight per input (default uniform)");
    cmdAverage->add_option("-o,--output", outputPath, "reconstructed OBJ");
    cmdAverage->add_option("--output-nric", outputNricPath);
    cmdAverage->add_option("--strategy", strategyName)->check(
        CLI::IsMember({"bfs", "mst", "spt", "pre"}));
    cmdAverage->add_option("--gn-steps", gnSteps);
    common.attach(cmdAverage);

    auto* cmdGeodesic = app.add_subcommand("geodesic", "discrete geodesic between shapes");
    cmdGeodesic->add_option("mesh", meshPath, "connectivity master")->required();
    cmdGeodesic->add_option("shapeA", inputPath)->required();
    cmdGeodesic->add_option("shapeB", inputBPath)->required();
    cmdGeodesic->add_option("-K,--segments", segments, "number of segments (>= 2)");
    cmdGeodesic->add_flag("--fix-lengths", fixLengths,
                          "eliminate all length variables along the path");
    cmdGeodesic->add_option("--output-prefix", outputPrefix,
                            "write <prefix>_<k>.obj and <prefix>_<k>.nric");
    cmdGeodesic->add_option("--strategy", strategyName)->check(
        CLI::IsMember({"bfs", "mst", "spt", "pre"}));
    cmdGeodesic->add_option("--gn-steps", gnSteps);
    common.attach(cmdGeodesic);

    auto* cmdReconstruct = app.add_subcommand("reconstruct", "coordinates -> positions");
    cmdReconstruct->add_option("mesh", meshPath, "connectivity master")->required();
    cmdReconstruct->add_option("nric", inputPath, "coordinate file")->required();
    cmdReconstruct->add_option("-o,--output", outputPath, "output OBJ")->required();
    cmdReconstruct->add_option("--strategy", strategyName)->check(
        CLI::IsMember({"bfs", "mst", "spt", "pre"}));
    cmdReconstruct->add_option("--gn-steps", gnSteps);
    cmdReconstruct->add_option("--samples", samplePaths,
                               "extra NRIC samples for the preassembled strategy");
    common.attach(cmdReconstruct);

    auto* cmdConvert = app.add_subcommand("convert", "mesh <-> NRIC");
    cmdConvert->add_option("input", inputPath, "OBJ/OFF or NRIC file")->required();
    cmdConvert->add_option("-o,--output", outputPath, "output file")->required();
    cmdConvert->add_option("--mesh", meshPath,
                           "connectivity master (required for NRIC input)");
    cmdConvert->add_option("--strategy", strategyName)->check(
        CLI::IsMember({"bfs", "mst", "spt", "pre"}));
    cmdConvert->add_option("--gn-steps", gnSteps);
    common.attach(cmdConvert);

    CLI11_PARSE(app, argc, argv);
    nric_tree_strategy strategy = parseStrategy(strategyName);

    if (cmdCheck->parsed()) {
        MeshHandle mesh{loadMesh(meshPath)};
        CoordsHandle coords{loadCoords(mesh.p, inputPath.empty() ? meshPath : inputPath)};
        char* report = nullptr;
        nric_status s = nric_check(mesh.p, coords.p, &report);
        emitReport(report, common.reportPath);
        if (s != NRIC_OK) die(s, "check");
        return 0;
    }

    if (cmdRigidity->parsed()) {
        MeshHandle mesh{loadMesh(meshPath)};
        CoordsHandle coords{loadCoords(mesh.p, inputPath.empty() ? meshPath : inputPath)};
        std::vector<int> selector;
        if (!selectorPath.empty())
            selector = readSelector(selectorPath, nric_mesh_interior_edge_count(mesh.p));
        double lambda0 = 0.0;
        int outcome = 0;
        char* report = nullptr;
        nric_status s = nric_rigidity(mesh.p, coords.p,
                                      selector.empty() ? nullptr : selector.data(),
                                      &lambda0, &outcome, &report);
        emitReport(report, common.reportPath);
        if (s != NRIC_OK) die(s, "rigidity");
        return 0;
    }

    if (cmdDeform->parsed()) {
        MeshHandle mesh{loadMesh(meshPath)};
        CoordsHandle coords{loadCoords(mesh.p, inputPath.empty() ? meshPath : inputPath)};
        nric_options options = common.build();
        nric_coords* solution = nullptr;
        char* report = nullptr;
        nric_status s = nric_deform(mesh.p, coords.p,
                                    constraintPath.empty() ? nullptr : constraintPath.c_str(),
                                    &options, &solution, &report);
        emitReport(report, common.reportPath);
        if (s != NRIC_OK && s != NRIC_ERR_NOT_CONVERGED) die(s, "deform");
        CoordsHandle guard{solution};
        writeShape(mesh.p, solution, outputPath, outputNricPath, strategy, gnSteps);
        if (s != NRIC_OK) die(s, "deform");
        return 0;
    }

    if (cmdAverage->parsed()) {
        MeshHandle mesh{loadMesh(meshPath)};
        std::vector<CoordsHandle> examples(inputs.size());
        std::vector<const nric_coords*> raw;
        for (size_t i = 0; i < inputs.size(); ++i) {
            examples[i].p = loadCoords(mesh.p, inputs[i]);
            raw.push_back(examples[i].p);
        }
        if (weights.empty()) weights.assign(inputs.size(), 1.0);
        if (weights.size() != inputs.size()) {
            std::cerr << "error: got " << weights.size() << " weights for "
                      << inputs.size() << " inputs\n";
            return 6;
        }
        nric_options options = common.build();
        nric_coords* solution = nullptr;
        char* report = nullptr;
        nric_status s = nric_average(mesh.p, raw.data(), weights.data(),
                                     static_cast<int>(raw.size()), &options, &solution,
                                     &report);
        emitReport(report, common.reportPath);
        if (s != NRIC_OK && s != NRIC_ERR_NOT_CONVERGED) die(s, "average");
        CoordsHandle guard{solution};
        writeShape(mesh.p, solution, outputPath, outputNricPath, strategy, gnSteps);
        if (s != NRIC_OK) die(s, "average");
        return 0;
    }

    if (cmdGeodesic->parsed()) {
        MeshHandle mesh{loadMesh(meshPath)};
        CoordsHandle a{loadCoords(mesh.p, inputPath)};
        CoordsHandle b{loadCoords(mesh.p, inputBPath)};
        nric_options options = common.build();
        std::vector<nric_coords*> shapes(segments + 1, nullptr);
        char* report = nullptr;
        nric_status s = nric_geodesic(mesh.p, a.p, b.p, segments, fixLengths ? 1 : 0,
                                      &options, shapes.data(), &report);
        emitReport(report, common.reportPath);
        if (s != NRIC_OK && s != NRIC_ERR_NOT_CONVERGED) die(s, "geodesic");
        std::vector<CoordsHandle> guards(shapes.size());
        for (size_t k = 0; k < shapes.size(); ++k) guards[k].p = shapes[k];
        if (!outputPrefix.empty()) {
            for (size_t k = 0; k < shapes.size(); ++k) {
                std::string stem = outputPrefix + "_" + std::to_string(k);
                writeShape(mesh.p, shapes[k], stem + ".obj", stem + ".nric", strategy,
                           gnSteps);
            }
        }
        if (s != NRIC_OK) die(s, "geodesic");
        return 0;
    }

    if (cmdReconstruct->parsed()) {
        MeshHandle mesh{loadMesh(meshPath)};
        CoordsHandle coords{loadCoords(mesh.p, inputPath)};
        std::vector<CoordsHandle> samples(samplePaths.size());
        std::vector<const nric_coords*> raw;
        for (size_t i = 0; i < samplePaths.size(); ++i) {
            samples[i].p = loadCoords(mesh.p, samplePaths[i]);
            raw.push_back(samples[i].p);
        }
        nric_mesh* out = nullptr;
        char* report = nullptr;
        nric_status s = nric_reconstruct(mesh.p, coords.p, strategy, gnSteps,
                                         raw.empty() ? nullptr : raw.data(),
                                         static_cast<int>(raw.size()), &out, &report);
        emitReport(report, common.reportPath);
        if (s != NRIC_OK) die(s, "reconstruct");
        MeshHandle guard{out};
        check(nric_mesh_save_obj(out, outputPath.c_str()), "writing " + outputPath);
        return 0;
    }

    if (cmdConvert->parsed()) {
        if (hasSuffix(inputPath, ".nric")) {
            if (meshPath.empty()) {
                std::cerr << "error: NRIC input needs --mesh for connectivity\n";
                return 6;
            }
            MeshHandle mesh{loadMesh(meshPath)};
            CoordsHandle coords{loadCoords(mesh.p, inputPath)};
            if (hasSuffix(outputPath, ".nric")) {
                check(nric_coords_save(coords.p, mesh.p, outputPath.c_str()),
                      "writing " + outputPath);
            } else {
                nric_mesh* out = nullptr;
                char* report = nullptr;
                check(nric_reconstruct(mesh.p, coords.p, strategy, gnSteps, nullptr, 0,
                                       &out, &report),
                      "reconstructing " + outputPath);
                emitReport(report, common.reportPath);
                MeshHandle guard{out};
                check(nric_mesh_save_obj(out, outputPath.c_str()), "writing " + outputPath);
            }
        } else {
            MeshHandle mesh{loadMesh(inputPath)};
            if (hasSuffix(outputPath, ".nric")) {
                CoordsHandle coords;
                check(nric_coords_from_mesh(mesh.p, &coords.p), "measuring " + inputPath);
                check(nric_coords_save(coords.p, mesh.p, outputPath.c_str()),
                      "writing " + outputPath);
            } else {
                check(nric_mesh_save_obj(mesh.p, outputPath.c_str()),
                      "writing " + outputPath);
            }
        }
        return 0;
    }

    return 6;
}
