#include "nric/nric.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "constraints.hpp"
#include "energies.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "objectives.hpp"
#include "reconstruction.hpp"
#include "solver.hpp"
#include "tangent.hpp"

struct nric_mesh {
    std::shared_ptr<nric::SimplicialSurface> surface;
    std::shared_ptr<nric::ConstraintSystem> system;
    nric::VertexPositions positions;  // |V| x 3; may be empty for derived meshes
};

struct nric_coords {
    nric::NricVector z;
};

namespace {

thread_local std::string g_lastError;

char* dupString(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

nric_status fail(nric_status status, const std::string& message) {
    g_lastError = message;
    return status;
}

template <typename F>
nric_status guarded(F&& body) {
    try {
        return body();
    } catch (const nric::ParseError& e) {
        return fail(NRIC_ERR_PARSE, e.what());
    } catch (const nric::MeshTopologyError& e) {
        return fail(NRIC_ERR_TOPOLOGY, e.what());
    } catch (const nric::InfeasibleStart& e) {
        return fail(NRIC_ERR_INFEASIBLE, e.what());
    } catch (const nric::EndpointInfeasible& e) {
        return fail(NRIC_ERR_INFEASIBLE, e.what());
    } catch (const nric::DegenerateFace& e) {
        return fail(NRIC_ERR_INFEASIBLE, e.what());
    } catch (const nric::TriangleInequalityViolated& e) {
        return fail(NRIC_ERR_INFEASIBLE, e.what());
    } catch (const nric::InfeasiblePoint& e) {
        return fail(NRIC_ERR_INFEASIBLE, e.what());
    } catch (const nric::NotOnManifold& e) {
        return fail(NRIC_ERR_INFEASIBLE, e.what());
    } catch (const nric::ReferenceDegenerate& e) {
        return fail(NRIC_ERR_INFEASIBLE, e.what());
    } catch (const std::exception& e) {
        return fail(NRIC_ERR_INTERNAL, e.what());
    }
}

nric_status requireArg(bool ok, const char* what) {
    if (ok) return NRIC_OK;
    return fail(NRIC_ERR_INVALID_ARGUMENT, std::string("invalid argument: ") + what);
}

bool coordsMatch(const nric_mesh* mesh, const nric_coords* coords) {
    return coords->z.lengths.size() == mesh->surface->edgeCount() &&
           coords->z.angles.size() == mesh->surface->interiorEdgeCount();
}

nric::SolverConfig solverConfig(const nric_options& o) {
    nric::SolverConfig c;
    c.mu0 = o.mu0;
    c.lambda0 = o.lambda0;
    c.muPlus = o.mu_plus;
    c.etaPlus = o.eta_plus;
    c.epsQ = o.eps_q;
    c.epsL = o.eps_l;
    c.kMax = o.k_max;
    c.jMax = o.j_max;
    c.tauPlus = o.tau_plus;
    c.betaShift = o.beta_shift;
    c.armijoSigma = o.armijo_sigma;
    c.backtrack = o.backtrack;
    c.minStep = o.min_step;
    c.bfgsWarmStart = o.bfgs_warm_start != 0;
    c.bfgsIterations = o.bfgs_iterations;
    return c;
}

nric::MaterialParameters materialParams(const nric_options& o) {
    nric::MaterialParameters p;
    p.mu = o.mu_mat;
    p.lambda = o.lambda_mat;
    p.delta = o.delta;
    return p;
}

nric::WeightRecipe weightRecipe(const nric_options& o) {
    return o.weight_recipe == 1 ? nric::WeightRecipe::AreaWeightedLength
                                : nric::WeightRecipe::InverseSquaredLength;
}

void applyThreads(const nric_options& o) {
    if (o.threads > 0) Eigen::setNbThreads(o.threads);
}

// Dissimilarity for the solver calls; quadratic weights frozen at zRef.
std::unique_ptr<nric::DeformationEnergy> makeEnergy(const nric::SimplicialSurface& surface,
                                                    const nric_options& o,
                                                    const nric::NricVector& zRef) {
    if (o.energy == NRIC_ENERGY_QUADRATIC) {
        nric::QuadraticWeights w = nric::quadraticWeights(surface, zRef, weightRecipe(o));
        return std::make_unique<nric::QuadraticEnergy>(surface, std::move(w),
                                                       materialParams(o));
    }
    return std::make_unique<nric::NonlinearEnergy>(surface, materialParams(o));
}

// Per interior vertex |2 pi - sum of incident corner angles| from lengths.
Eigen::VectorXd angleDefects(const nric::SimplicialSurface& s, const nric::NricVector& z) {
    const auto& interior = s.interiorVertices();
    Eigen::VectorXd defect(interior.size());
    for (size_t i = 0; i < interior.size(); ++i) {
        const nric::VertexFan& fan = s.fan(interior[i]);
        double sum = 0.0;
        const int n = static_cast<int>(fan.faces.size());
        for (int k = 0; k < n; ++k) {
            double a = z.lengths[fan.edges[k]];
            double b = z.lengths[fan.edges[(k + 1) % n]];
            double c = z.lengths[fan.oppositeEdges[k]];
            sum += nric::interiorAngle(a, b, c);
        }
        defect[i] = std::abs(2.0 * M_PI - sum);
    }
    return defect;
}

nric_mesh* cloneWithPositions(const nric_mesh* mesh, nric::VertexPositions positions) {
    auto* out = new nric_mesh;
    out->surface = mesh->surface;
    out->system = mesh->system;
    out->positions = std::move(positions);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

extern "C" {

const char* nric_last_error(void) { return g_lastError.c_str(); }

void nric_string_free(char* s) { std::free(s); }

/* ---- meshes -------------------------------------------------------- */

nric_status nric_mesh_load(const char* path, nric_mesh** out) {
    if (requireArg(path && out, "nric_mesh_load")) return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() {
        nric::MeshData data = nric::readMesh(path);
        auto* mesh = new nric_mesh;
        mesh->surface = std::make_shared<nric::SimplicialSurface>(
            static_cast<int>(data.positions.rows()), data.faces);
        mesh->system = std::make_shared<nric::ConstraintSystem>(*mesh->surface);
        mesh->positions = std::move(data.positions);
        *out = mesh;
        return NRIC_OK;
    });
}

nric_status nric_mesh_save_obj(const nric_mesh* mesh, const char* path) {
    if (requireArg(mesh && path, "nric_mesh_save_obj")) return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(mesh->positions.rows() == mesh->surface->vertexCount(),
                   "mesh carries no vertex positions"))
        return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() {
        nric::writeObj(path, mesh->surface->faces(), mesh->positions);
        return NRIC_OK;
    });
}

void nric_mesh_free(nric_mesh* mesh) { delete mesh; }

int nric_mesh_vertex_count(const nric_mesh* m) { return m->surface->vertexCount(); }
int nric_mesh_edge_count(const nric_mesh* m) { return m->surface->edgeCount(); }
int nric_mesh_interior_edge_count(const nric_mesh* m) {
    return m->surface->interiorEdgeCount();
}
int nric_mesh_face_count(const nric_mesh* m) { return m->surface->faceCount(); }
int nric_mesh_euler_characteristic(const nric_mesh* m) {
    return m->surface->eulerCharacteristic();
}
int nric_mesh_is_closed(const nric_mesh* m) { return m->surface->isClosed() ? 1 : 0; }

/* ---- coordinates --------------------------------------------------- */

nric_status nric_coords_from_mesh(const nric_mesh* mesh, nric_coords** out) {
    if (requireArg(mesh && out, "nric_coords_from_mesh")) return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(mesh->positions.rows() == mesh->surface->vertexCount(),
                   "mesh carries no vertex positions"))
        return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() {
        auto* coords = new nric_coords{nric::forwardMap(*mesh->surface, mesh->positions)};
        *out = coords;
        return NRIC_OK;
    });
}

nric_status nric_coords_load(const char* path, const nric_mesh* mesh, nric_coords** out) {
    if (requireArg(path && mesh && out, "nric_coords_load")) return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() {
        *out = new nric_coords{nric::readNric(path, *mesh->surface)};
        return NRIC_OK;
    });
}

nric_status nric_coords_save(const nric_coords* coords, const nric_mesh* mesh,
                             const char* path) {
    if (requireArg(coords && mesh && path, "nric_coords_save"))
        return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(coordsMatch(mesh, coords), "coords do not match mesh"))
        return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() {
        nric::writeNric(path, *mesh->surface, coords->z);
        return NRIC_OK;
    });
}

void nric_coords_free(nric_coords* coords) { delete coords; }

/* ---- options ------------------------------------------------------- */

void nric_options_init(nric_options* o) {
    nric::SolverConfig c;
    nric::MaterialParameters p;
    o->mu0 = c.mu0;
    o->lambda0 = c.lambda0;
    o->mu_plus = c.muPlus;
    o->eta_plus = c.etaPlus;
    o->eps_q = c.epsQ;
    o->eps_l = c.epsL;
    o->k_max = c.kMax;
    o->j_max = c.jMax;
    o->tau_plus = c.tauPlus;
    o->beta_shift = c.betaShift;
    o->armijo_sigma = c.armijoSigma;
    o->backtrack = c.backtrack;
    o->min_step = c.minStep;
    o->bfgs_warm_start = c.bfgsWarmStart ? 1 : 0;
    o->bfgs_iterations = c.bfgsIterations;
    o->mu_mat = p.mu;
    o->lambda_mat = p.lambda;
    o->delta = p.delta;
    o->energy = NRIC_ENERGY_NONLINEAR;
    o->weight_recipe = 0;
    o->threads = 0;
}

nric_status nric_options_load(const char* path, nric_options* o) {
    if (requireArg(path && o, "nric_options_load")) return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() -> nric_status {
        std::ifstream in(path);
        if (!in) throw nric::ParseError(std::string("cannot open config file: ") + path);
        std::string line;
        int lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw nric::ParseError("config line " + std::to_string(lineNo) +
                                       ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            auto num = [&]() {
                try {
                    size_t used = 0;
                    double v = std::stod(value, &used);
                    if (used != value.size()) throw std::invalid_argument(value);
                    return v;
                } catch (const std::exception&) {
                    throw nric::ParseError("config line " + std::to_string(lineNo) +
                                           ": bad number '" + value + "'");
                }
            };
            if (key == "mu0") o->mu0 = num();
            else if (key == "lambda0") o->lambda0 = num();
            else if (key == "mu_plus") o->mu_plus = num();
            else if (key == "eta_plus") o->eta_plus = num();
            else if (key == "eps_Q") o->eps_q = num();
            else if (key == "eps_L") o->eps_l = num();
            else if (key == "k_max") o->k_max = static_cast<int>(num());
            else if (key == "j_max") o->j_max = static_cast<int>(num());
            else if (key == "tau_plus") o->tau_plus = num();
            else if (key == "beta_shift") o->beta_shift = num();
            else if (key == "armijo_sigma") o->armijo_sigma = num();
            else if (key == "backtrack") o->backtrack = num();
            else if (key == "min_step") o->min_step = num();
            else if (key == "bfgs_warm_start") o->bfgs_warm_start = num() != 0.0;
            else if (key == "bfgs_iterations") o->bfgs_iterations = static_cast<int>(num());
            else if (key == "mu") o->mu_mat = num();
            else if (key == "lambda") o->lambda_mat = num();
            else if (key == "delta") o->delta = num();
            else if (key == "threads") o->threads = static_cast<int>(num());
            else if (key == "energy") {
                if (value == "nonlinear") o->energy = NRIC_ENERGY_NONLINEAR;
                else if (value == "quadratic") o->energy = NRIC_ENERGY_QUADRATIC;
                else
                    throw nric::ParseError("config line " + std::to_string(lineNo) +
                                           ": energy must be nonlinear or quadratic");
            } else if (key == "weight_recipe") {
                if (value == "length") o->weight_recipe = 0;
                else if (value == "area") o->weight_recipe = 1;
                else
                    throw nric::ParseError("config line " + std::to_string(lineNo) +
                                           ": weight_recipe must be length or area");
            } else {
                throw nric::ParseError("config line " + std::to_string(lineNo) +
                                       ": unknown key '" + key + "'");
            }
        }
        return NRIC_OK;
    });
}

/* ---- operations ---------------------------------------------------- */

nric_status nric_check(const nric_mesh* mesh, const nric_coords* coords, char** report) {
    if (requireArg(mesh && coords && report, "nric_check")) return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(coordsMatch(mesh, coords), "coords do not match mesh"))
        return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() -> nric_status {
        const nric::SimplicialSurface& s = *mesh->surface;
        nric::TriangleInequalities tri = nric::triangleInequalities(s, coords->z);
        std::ostringstream os;
        os.precision(12);
        os << "vertices = " << s.vertexCount() << "\n"
           << "edges = " << s.edgeCount() << "\n"
           << "interior_edges = " << s.interiorEdgeCount() << "\n"
           << "faces = " << s.faceCount() << "\n"
           << "euler_characteristic = " << s.eulerCharacteristic() << "\n"
           << "boundary_loops = " << s.boundaryLoopCount() << "\n"
           << "min_triangle_slack = " << tri.values.minCoeff() << "\n"
           << "admissible = " << (tri.allStrictlyPositive ? 1 : 0) << "\n";
        double qInf = 0.0;
        if (tri.allStrictlyPositive) {
            Eigen::VectorXd q = mesh->system->residual(coords->z);
            qInf = q.size() > 0 ? q.cwiseAbs().maxCoeff() : 0.0;
            os << "integrability_inf = " << qInf << "\n";
            Eigen::VectorXd r = mesh->system->rotationResidual(coords->z);
            os << "max_rotation_residual = " << (r.size() > 0 ? r.maxCoeff() : 0.0) << "\n";
            std::vector<int> order(r.size());
            for (int i = 0; i < r.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int x, int y) { return r[x] > r[y]; });
            const auto& interior = s.interiorVertices();
            for (size_t i = 0; i < order.size() && i < 5; ++i)
                os << "violation_vertex_" << i << " = " << interior[order[i]] << " "
                   << r[order[i]] << "\n";
        }
        *report = dupString(os.str());
        if (!tri.allStrictlyPositive)
            return fail(NRIC_ERR_INFEASIBLE, "triangle inequality violated");
        return NRIC_OK;
    });
}

nric_status nric_rigidity(const nric_mesh* mesh, const nric_coords* coords,
                          const int* angle_selector, double* lambda0, int* outcome,
                          char** report) {
    if (requireArg(mesh && coords && lambda0 && outcome, "nric_rigidity"))
        return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(coordsMatch(mesh, coords), "coords do not match mesh"))
        return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() {
        std::vector<bool> selector;
        if (angle_selector) {
            selector.resize(mesh->surface->interiorEdgeCount());
            for (size_t j = 0; j < selector.size(); ++j) selector[j] = angle_selector[j] != 0;
        }
        nric::RigidityResult r = nric::rigidityTest(*mesh->system, coords->z, selector);
        *lambda0 = r.lambda0;
        *outcome = r.candidateSubspaceEmpty ? 2 : (r.variation.has_value() ? 1 : 0);
        if (report) {
            std::ostringstream os;
            os.precision(12);
            os << "lambda0 = " << r.lambda0 << "\n"
               << "sigma_max = " << r.sigmaMax << "\n"
               << "tangent_dim = " << r.tangentDim << "\n"
               << "candidate_subspace_empty = " << (r.candidateSubspaceEmpty ? 1 : 0) << "\n"
               << "flexible = " << (r.variation.has_value() ? 1 : 0) << "\n";
            *report = dupString(os.str());
        }
        return NRIC_OK;
    });
}

nric_status nric_deform(const nric_mesh* mesh, const nric_coords* coords,
                        const char* constraint_path, const nric_options* options,
                        nric_coords** out, char** report) {
    if (requireArg(mesh && coords && options && out, "nric_deform"))
        return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(coordsMatch(mesh, coords), "coords do not match mesh"))
        return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() -> nric_status {
        applyThreads(*options);
        const nric::SimplicialSurface& s = *mesh->surface;
        auto energy = makeEnergy(s, *options, coords->z);
        nric::ShapeProblem shape(*mesh->system, *energy, {coords->z}, {1.0});

        nric::FixedCoordinates fixed;
        if (constraint_path)
            fixed = nric::parseConstraintFile(constraint_path, s, coords->z);

        nric::SolverConfig config = solverConfig(*options);
        nric::SolveResult result;
        if (fixed.empty()) {
            result = nric::solveConstrained(shape, coords->z.stacked(), config);
        } else {
            nric::EliminatedProblem reduced(shape, fixed);
            nric::SolveResult inner =
                nric::solveConstrained(reduced, reduced.restrict(coords->z.stacked()), config);
            result = inner;
            result.x = reduced.embed(inner.x);
        }

        nric::NricVector z = nric::NricVector::fromStacked(s, result.x);
        *out = new nric_coords{z};
        if (report) {
            std::ostringstream os;
            os << result.report.text();
            Eigen::VectorXd defect = angleDefects(s, z);
            os.precision(12);
            os << "fixed_coordinates = " << fixed.indices.size() << "\n"
               << "max_angle_defect = " << (defect.size() > 0 ? defect.maxCoeff() : 0.0)
               << "\n"
               << "mean_angle_defect = " << (defect.size() > 0 ? defect.mean() : 0.0) << "\n";
            *report = dupString(os.str());
        }
        if (!result.report.converged)
            return fail(NRIC_ERR_NOT_CONVERGED, result.report.message);
        return NRIC_OK;
    });
}

nric_status nric_average(const nric_mesh* mesh, const nric_coords* const* examples,
                         const double* weights, int n, const nric_options* options,
                         nric_coords** out, char** report) {
    if (requireArg(mesh && examples && weights && n > 0 && options && out, "nric_average"))
        return NRIC_ERR_INVALID_ARGUMENT;
    for (int i = 0; i < n; ++i)
        if (requireArg(examples[i] && coordsMatch(mesh, examples[i]),
                       "example coords do not match mesh"))
            return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() -> nric_status {
        applyThreads(*options);
        const nric::SimplicialSurface& s = *mesh->surface;
        double wSum = 0.0;
        for (int i = 0; i < n; ++i) wSum += weights[i];
        if (wSum <= 0.0)
            return fail(NRIC_ERR_INVALID_ARGUMENT, "weights must have positive sum");

        std::vector<nric::NricVector> refs;
        std::vector<double> w(n);
        nric::NricVector init = nric::NricVector::zero(s);
        Eigen::VectorXd logLengths = Eigen::VectorXd::Zero(s.edgeCount());
        for (int i = 0; i < n; ++i) {
            w[i] = weights[i] / wSum;
            refs.push_back(examples[i]->z);
            init.lengths += w[i] * examples[i]->z.lengths;
            init.angles += w[i] * examples[i]->z.angles;
            logLengths += w[i] * examples[i]->z.lengths.array().log().matrix();
        }
        if (!nric::triangleInequalities(s, init).allStrictlyPositive)
            init.lengths = logLengths.array().exp().matrix();

        auto energy = makeEnergy(s, *options, init);
        nric::ShapeProblem shape(*mesh->system, *energy, std::move(refs), std::move(w));
        nric::SolveResult result =
            nric::solveConstrained(shape, init.stacked(), solverConfig(*options));

        *out = new nric_coords{nric::NricVector::fromStacked(s, result.x)};
        if (report) *report = dupString(result.report.text());
        if (!result.report.converged)
            return fail(NRIC_ERR_NOT_CONVERGED, result.report.message);
        return NRIC_OK;
    });
}

nric_status nric_geodesic(const nric_mesh* mesh, const nric_coords* a,
                          const nric_coords* b, int K, int fix_lengths,
                          const nric_options* options, nric_coords** shapes,
                          char** report) {
    if (requireArg(mesh && a && b && options && shapes && K >= 2, "nric_geodesic"))
        return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(coordsMatch(mesh, a) && coordsMatch(mesh, b),
                   "coords do not match mesh"))
        return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() -> nric_status {
        applyThreads(*options);
        const nric::SimplicialSurface& s = *mesh->surface;
        auto energy = makeEnergy(s, *options, a->z);
        nric::GeodesicProblem problem(*mesh->system, *energy, a->z, b->z, K);
        nric::GeodesicPath init = nric::initializeGeodesic(s, a->z, b->z, K);
        Eigen::VectorXd x0 = problem.stackFree(init);

        nric::SolverConfig config = solverConfig(*options);
        nric::SolveResult result;
        if (fix_lengths) {
            nric::FixedCoordinates fixed;
            const int shapeDim = s.nricDim();
            for (int k = 1; k < K; ++k)
                for (int e = 0; e < s.edgeCount(); ++e)
                    fixed.indices.push_back((k - 1) * shapeDim + e);
            fixed.values.resize(fixed.indices.size());
            for (size_t i = 0; i < fixed.indices.size(); ++i)
                fixed.values[i] = x0[fixed.indices[i]];
            nric::EliminatedProblem reduced(problem, fixed);
            nric::SolveResult inner =
                nric::solveConstrained(reduced, reduced.restrict(x0), config);
            result = inner;
            result.x = reduced.embed(inner.x);
        } else {
            result = nric::solveConstrained(problem, x0, config);
        }

        nric::GeodesicPath path = problem.unstack(result.x);
        for (int k = 0; k <= K; ++k) shapes[k] = new nric_coords{path.shapes[k]};
        if (report) {
            Eigen::VectorXd seg = problem.segmentEnergies(result.x);
            double mean = seg.mean();
            double sd = seg.size() > 1
                            ? std::sqrt((seg.array() - mean).square().sum() /
                                        static_cast<double>(seg.size() - 1))
                            : 0.0;
            std::ostringstream os;
            os << result.report.text();
            os.precision(12);
            os << "segments = " << K << "\n"
               << "segment_energy_mean = " << mean << "\n"
               << "segment_energy_rel_std = " << (mean > 0 ? sd / mean : 0.0) << "\n";
            for (int k = 0; k < seg.size(); ++k)
                os << "segment_energy_" << (k + 1) << " = " << seg[k] << "\n";
            *report = dupString(os.str());
        }
        if (!result.report.converged)
            return fail(NRIC_ERR_NOT_CONVERGED, result.report.message);
        return NRIC_OK;
    });
}

nric_status nric_reconstruct(const nric_mesh* mesh, const nric_coords* coords,
                             nric_tree_strategy strategy, int gauss_newton_steps,
                             const nric_coords* const* samples, int sample_count,
                             nric_mesh** out, char** report) {
    if (requireArg(mesh && coords && out && gauss_newton_steps >= 0, "nric_reconstruct"))
        return NRIC_ERR_INVALID_ARGUMENT;
    if (requireArg(coordsMatch(mesh, coords), "coords do not match mesh"))
        return NRIC_ERR_INVALID_ARGUMENT;
    for (int i = 0; i < sample_count; ++i)
        if (requireArg(samples && samples[i] && coordsMatch(mesh, samples[i]),
                       "sample coords do not match mesh"))
            return NRIC_ERR_INVALID_ARGUMENT;
    return guarded([&]() {
        nric::ReconstructOptions options;
        switch (strategy) {
            case NRIC_TREE_BFS: options.strategy = nric::TreeStrategy::BFS; break;
            case NRIC_TREE_MST: options.strategy = nric::TreeStrategy::MST; break;
            case NRIC_TREE_SPT: options.strategy = nric::TreeStrategy::SPT; break;
            case NRIC_TREE_PREASSEMBLED:
                options.strategy = nric::TreeStrategy::Preassembled;
                break;
            default:
                return fail(NRIC_ERR_INVALID_ARGUMENT, "unknown tree strategy");
        }
        options.gaussNewtonSteps = gauss_newton_steps;
        for (int i = 0; i < sample_count; ++i) options.samples.push_back(samples[i]->z);
        auto [positions, rep] = nric::reconstruct(*mesh->system, coords->z, options);
        *out = cloneWithPositions(mesh, std::move(positions));
        if (report) *report = dupString(rep.text());
        return NRIC_OK;
    });
}

}  // extern "C"
