// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Each criterion is self-contained and uses independent
// oracles (finite differences, Procrustes alignment, brute-force recomputation)
// rather than the code paths under test wherever possible.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "meshgen.hpp"
#include "objectives.hpp"
#include "reconstruction.hpp"
#include "tangent.hpp"

using namespace nric;
using namespace nric::testing;
using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

double diameter(const VertexPositions& X) {
    double d = 0.0;
    for (int i = 0; i < X.rows(); ++i)
        for (int j = i + 1; j < X.rows(); ++j)
            d = std::max(d, (X.row(i) - X.row(j)).norm());
    return d;
}

double relErrorM(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

// Flat grid folded along the vertical line x = hinge.
Mesh foldedGrid(int nx, int ny, double angle, int hinge) {
    Mesh m = grid(nx, ny);
    double xc = static_cast<double>(hinge);
    for (int v = 0; v < m.positions.rows(); ++v) {
        double x = m.positions(v, 0);
        if (x > xc + 1e-12) {
            double r = x - xc;
            m.positions(v, 0) = xc + r * std::cos(angle);
            m.positions(v, 2) = r * std::sin(angle);
        }
    }
    return m;
}

// Plate bent cylindrically around the x-axis (the transpose of bentPlate).
Mesh bentPlateX(int nx, int ny, double angle, double dx = 1.0) {
    Mesh m = grid(nx, ny, dx);
    double width = ny * dx;
    double radius = width / angle;
    for (int i = 0; i < m.positions.rows(); ++i) {
        double y = m.positions(i, 1);
        double phi = y / radius;
        m.positions(i, 1) = radius * std::sin(phi);
        m.positions(i, 2) = radius * (1.0 - std::cos(phi));
    }
    return m;
}

// Gaussian dent pressed into the plate along z around (cx, cy).
Mesh dent(Mesh m, double cx, double cy, double amp, double sigma) {
    for (int v = 0; v < m.positions.rows(); ++v) {
        double dx = m.positions(v, 0) - cx, dy = m.positions(v, 1) - cy;
        m.positions(v, 2) += amp * std::exp(-(dx * dx + dy * dy) / (sigma * sigma));
    }
    return m;
}

std::vector<Mesh> corpus() {
    std::vector<Mesh> meshes;
    meshes.push_back(icosahedron());
    meshes.push_back(icosphere(3));  // 1280 faces
    meshes.push_back(grid(10, 10, 0.4, [](double x, double y) {
        return 0.35 * std::sin(2.0 * x) * std::cos(1.5 * y);
    }));  // bumpy plate with boundary
    meshes.push_back(tetrahedron());
    meshes.push_back(foldedGrid(20, 2, 1.1, 10));  // creased strip
    return meshes;
}

// Per-interior-vertex angle defect |2 pi - sum of corner angles| measured
// directly from positions (independent of the NRIC pipeline).
Eigen::VectorXd positionAngleDefects(const SimplicialSurface& s,
                                     const VertexPositions& X) {
    const auto& interior = s.interiorVertices();
    Eigen::VectorXd defect = Eigen::VectorXd::Zero(interior.size());
    for (size_t i = 0; i < interior.size(); ++i) {
        int v = interior[i];
        double sum = 0.0;
        for (int f = 0; f < s.faceCount(); ++f)
            for (int k = 0; k < 3; ++k)
                if (s.faces()(f, k) == v) {
                    Eigen::Vector3d a =
                        (X.row(s.faces()(f, (k + 1) % 3)) - X.row(v)).normalized();
                    Eigen::Vector3d b =
                        (X.row(s.faces()(f, (k + 2) % 3)) - X.row(v)).normalized();
                    sum += std::acos(std::clamp(a.dot(b), -1.0, 1.0));
                }
        defect[i] = std::abs(2.0 * M_PI - sum);
    }
    return defect;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---- criterion 1: integrability of the forward map --------------------

Outcome criterion1() {
    auto t0 = Clock::now();
    double worst = 0.0;
    for (const Mesh& m : corpus()) {
        SimplicialSurface s = m.surface();
        ConstraintSystem system(s);
        Eigen::VectorXd q = system.residual(forwardMap(s, m.positions));
        if (q.size() > 0) worst = std::max(worst, q.cwiseAbs().maxCoeff());
    }
    double elapsed = seconds(t0, Clock::now());
    std::ostringstream os;
    os << "max |Q| = " << worst << ", " << elapsed << " s";
    return {worst < 1e-10 && elapsed < 1.0, os.str()};
}

// ---- criterion 2: derivatives vs central finite differences -----------

Outcome criterion2() {
    auto t0 = Clock::now();
    std::mt19937 rng(101);
    std::normal_distribution<double> gauss;
    Mesh m = grid(3, 3, 0.9, [](double x, double y) { return 0.25 * std::sin(x * y); });
    SimplicialSurface s = m.surface();
    ConstraintSystem system(s);
    NricVector z0 = forwardMap(s, m.positions);
    MaterialParameters p{1.0, 1.0, 0.5};
    NonlinearEnergy nonlinear(s, p);
    QuadraticEnergy quadratic(s, quadraticWeights(s, z0), p);
    const int n = s.nricDim();
    double worstFirst = 0.0, worstSecond = 0.0;

    for (int trial = 0; trial < 20; ++trial) {
        NricVector z = perturbFeasible(s, z0, 0.04, rng);
        NricVector zt = perturbFeasible(s, z0, 0.04, rng);
        Eigen::VectorXd flat = z.stacked(), flatT = zt.stacked();

        // constraint Jacobian
        const double h1 = 1e-6, h2 = 1e-5;
        Eigen::MatrixXd jac = Eigen::MatrixXd(system.jacobian(z));
        Eigen::MatrixXd fdJ(jac.rows(), jac.cols());
        for (int c = 0; c < n; ++c) {
            Eigen::VectorXd up = flat, dn = flat;
            up[c] += h1;
            dn[c] -= h1;
            fdJ.col(c) = (system.residual(NricVector::fromStacked(s, up)) -
                          system.residual(NricVector::fromStacked(s, dn))) /
                         (2 * h1);
        }
        worstFirst = std::max(worstFirst, relErrorM(jac, fdJ));

        // constraint Hessian contraction
        Eigen::VectorXd w(system.constraintDim());
        for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
        Eigen::MatrixXd hc = Eigen::MatrixXd(system.hessianContraction(z, w));
        Eigen::MatrixXd fdH(n, n);
        for (int c = 0; c < n; ++c) {
            Eigen::VectorXd up = flat, dn = flat;
            up[c] += h2;
            dn[c] -= h2;
            fdH.col(c) =
                (system.jacobian(NricVector::fromStacked(s, up)).transpose() * w -
                 system.jacobian(NricVector::fromStacked(s, dn)).transpose() * w) /
                (2 * h2);
        }
        worstSecond = std::max(worstSecond, relErrorM(hc, fdH));

        // energies: gradients and all Hessian blocks
        for (const DeformationEnergy* energy :
             std::initializer_list<const DeformationEnergy*>{&nonlinear, &quadratic}) {
            EnergyDerivatives d = energy->derivatives(z, zt, true);
            Eigen::VectorXd fdG2(n), fdG1(n);
            Eigen::MatrixXd fdH22(n, n), fdH11(n, n), fdH12(n, n);
            for (int c = 0; c < n; ++c) {
                Eigen::VectorXd up = flatT, dn = flatT;
                up[c] += h2;
                dn[c] -= h2;
                NricVector zup = NricVector::fromStacked(s, up);
                NricVector zdn = NricVector::fromStacked(s, dn);
                fdG2[c] = (energy->value(z, zup) - energy->value(z, zdn)) / (2 * h2);
                EnergyDerivatives du = energy->derivatives(z, zup, true);
                EnergyDerivatives dd = energy->derivatives(z, zdn, true);
                fdH22.col(c) = (du.grad2 - dd.grad2) / (2 * h2);
                fdH12.col(c) = (du.grad1 - dd.grad1) / (2 * h2);

                Eigen::VectorXd up1 = flat, dn1 = flat;
                up1[c] += h2;
                dn1[c] -= h2;
                NricVector zup1 = NricVector::fromStacked(s, up1);
                NricVector zdn1 = NricVector::fromStacked(s, dn1);
                fdG1[c] = (energy->value(zup1, zt) - energy->value(zdn1, zt)) / (2 * h2);
                EnergyDerivatives du1 = energy->derivatives(zup1, zt, true);
                EnergyDerivatives dd1 = energy->derivatives(zdn1, zt, true);
                fdH11.col(c) = (du1.grad1 - dd1.grad1) / (2 * h2);
            }
            worstFirst = std::max({worstFirst, relErrorM(d.grad2, fdG2),
                                   relErrorM(d.grad1, fdG1)});
            worstSecond = std::max({worstSecond, relErrorM(Eigen::MatrixXd(d.hess22), fdH22),
                                    relErrorM(Eigen::MatrixXd(d.hess11), fdH11),
                                    relErrorM(Eigen::MatrixXd(d.hess12), fdH12)});
        }
    }
    double elapsed = seconds(t0, Clock::now());
    std::ostringstream os;
    os << "max rel err: first " << worstFirst << ", second " << worstSecond << ", "
       << elapsed << " s";
    return {worstFirst < 1e-6 && worstSecond < 1e-5 && elapsed < 30.0, os.str()};
}

// ---- criterion 3: reconstruction round trip ---------------------------

Outcome criterion3() {
    double worstCoord = 0.0, worstRms = 0.0;
    for (const Mesh& m : corpus()) {
        SimplicialSurface s = m.surface();
        ConstraintSystem system(s);
        NricVector z = forwardMap(s, m.positions);
        double diam = diameter(m.positions);
        for (TreeStrategy strategy :
             {TreeStrategy::BFS, TreeStrategy::MST, TreeStrategy::SPT}) {
            ReconstructOptions options;
            options.strategy = strategy;
            auto [X, report] = reconstruct(system, z, options);
            double coord =
                (forwardMap(s, X).stacked() - z.stacked()).cwiseAbs().maxCoeff();
            double rms = procrustesRms(X, m.positions) / diam;
            worstCoord = std::max(worstCoord, coord);
            worstRms = std::max(worstRms, rms);
        }
    }
    std::ostringstream os;
    os << "max coord err = " << worstCoord << ", max Procrustes/diam = " << worstRms;
    return {worstCoord < 1e-8 && worstRms < 1e-8, os.str()};
}

// ---- criteria 4 + 5: hybrid robustness and constrained projection -----

struct BlendSetup {
    SimplicialSurface surface;
    ConstraintSystem system;
    NricVector blend;

    BlendSetup(const Mesh& a, const Mesh& b)
        : surface(a.surface()), system(surface) {
        NricVector za = forwardMap(surface, a.positions);
        NricVector zb = forwardMap(surface, b.positions);
        blend = NricVector((za.lengths + zb.lengths) / 2, (za.angles + zb.angles) / 2);
    }
};

Outcome criterion4(const NricVector* projected, const ConstraintSystem* projectedSystem) {
    // linear blend of two bent-plate poses; the dent localizes the
    // non-integrability so the MST traversal can route around it
    BlendSetup setup(bentPlate(10, 10, 1.0, 0.25),
                     dent(bentPlate(10, 10, 1.0, 0.25), 0.5, 0.5, 0.35, 0.45));
    MaterialParameters p;
    QuadraticWeights w = quadraticWeights(setup.surface, setup.blend);

    auto residual = [&](TreeStrategy strategy, int gn) {
        ReconstructOptions options;
        options.strategy = strategy;
        options.gaussNewtonSteps = gn;
        auto [X, report] = reconstruct(setup.system, setup.blend, options);
        return quadraticEnergy(setup.surface, setup.blend, forwardMap(setup.surface, X),
                               w, p);
    };
    double mst = residual(TreeStrategy::MST, 1);
    double bfs = residual(TreeStrategy::BFS, 0);

    // solver-projected blend reconstructs to machine-level residual
    double projResidual = 1e300;
    if (projected) {
        ReconstructOptions options;
        auto [X, report] = reconstruct(*projectedSystem, *projected, options);
        projResidual = report.finalResidual;
    }
    std::ostringstream os;
    os << "W_q residual MST+1GN = " << mst << ", BFS = " << bfs
       << ", projected-blend residual = " << projResidual;
    return {mst <= bfs && projResidual < 1e-6, os.str()};
}

Outcome criterion5(NricVector* projectedOut, std::unique_ptr<BlendSetup>& setupOut) {
    auto t0 = Clock::now();
    setupOut = std::make_unique<BlendSetup>(bentPlate(26, 26, 1.2, 1.0 / 26),
                                            bentPlateX(26, 26, 1.2, 1.0 / 26));
    BlendSetup& setup = *setupOut;
    int edges = setup.surface.edgeCount();

    SolverConfig config;  // paper defaults mu0 = 10, mu+ = 100, eta+ = 0.9
    SolveResult r = projectToManifold(setup.system, setup.blend, config);
    double elapsed = seconds(t0, Clock::now());
    *projectedOut = NricVector::fromStacked(setup.surface, r.x);

    std::ostringstream os;
    os << edges << " edges, |Q|_inf = " << r.report.finalConstraintInf
       << ", |DL| = " << r.report.finalGradNorm << ", outer = "
       << r.report.outerIterations << ", " << elapsed << " s";
    bool pass = r.report.converged && r.report.finalConstraintInf <= 1e-8 &&
                r.report.finalGradNorm <= 1e-4 && r.report.outerIterations <= 30 &&
                elapsed < 60.0;
    return {pass, os.str()};
}

// ---- criterion 6: exact isometric folding -----------------------------

Outcome criterion6() {
    Mesh m = grid(40, 10);  // 800 faces
    SimplicialSurface s = m.surface();
    ConstraintSystem system(s);
    NricVector z0 = forwardMap(s, m.positions);

    // fix all lengths; fix the crease angles at x = 20 to pi/2
    FixedCoordinates fixed;
    for (int e = 0; e < s.edgeCount(); ++e) {
        fixed.indices.push_back(e);
    }
    std::vector<double> values(z0.lengths.data(), z0.lengths.data() + s.edgeCount());
    int creased = 0;
    for (int e = 0; e < s.edgeCount(); ++e) {
        if (s.isBoundaryEdge(e)) continue;
        int a = s.edges()(e, 0), b = s.edges()(e, 1);
        if (std::abs(m.positions(a, 0) - 20.0) < 1e-9 &&
            std::abs(m.positions(b, 0) - 20.0) < 1e-9) {
            fixed.indices.push_back(s.edgeCount() + s.interiorEdgeIndex(e));
            values.push_back(M_PI / 2);
            ++creased;
        }
    }
    fixed.values = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());

    MaterialParameters p;
    QuadraticWeights w = quadraticWeights(s, z0);
    QuadraticEnergy energy(s, w, p);
    ShapeProblem shape(system, energy, {z0}, {1.0});
    EliminatedProblem reduced(shape, fixed);
    SolverConfig config;
    Eigen::VectorXd x0 = reduced.restrict(z0.stacked());
    SolveResult r = solveConstrained(reduced, x0, config);

    NricVector solution = NricVector::fromStacked(s, reduced.embed(r.x));
    ReconstructOptions options;
    auto [X, report] = reconstruct(system, solution, options);
    Eigen::VectorXd defect = positionAngleDefects(s, X);
    double maxDefect = defect.size() > 0 ? defect.maxCoeff() : 0.0;
    double crease = 0.0;
    for (int e = 0; e < s.edgeCount(); ++e)
        if (!s.isBoundaryEdge(e)) crease = std::max(crease, solution.angles[s.interiorEdgeIndex(e)]);
    std::ostringstream os;
    os << creased << " crease angles at pi/2, converged = " << r.report.converged
       << ", max interior angle defect = " << maxDefect;
    return {r.report.converged && creased == 10 && maxDefect < 1e-6 && crease > 1.5,
            os.str()};
}

// ---- criterion 7: geodesic constant speed -----------------------------

double relStd(const Eigen::VectorXd& v) {
    double mean = v.mean();
    double sd = std::sqrt((v.array() - mean).square().sum() / (v.size() - 1));
    return sd / mean;
}

Outcome criterion7() {
    // oppositely bent plates; the shared dent breaks the mirror symmetry that
    // would otherwise make the linear path constant-speed by construction
    Mesh a = dent(bentPlate(8, 8, 1.4, 0.25), 1.0, 1.0, 0.3, 0.5);
    Mesh b = dent(bentPlate(8, 8, -1.4, 0.25), 1.0, 1.0, 0.3, 0.5);
    SimplicialSurface s = a.surface();
    ConstraintSystem system(s);
    NricVector za = forwardMap(s, a.positions), zb = forwardMap(s, b.positions);
    MaterialParameters p;
    NonlinearEnergy energy(s, p);
    const int K = 10;
    GeodesicProblem problem(system, energy, za, zb, K);
    GeodesicPath init = initializeGeodesic(s, za, zb, K);
    Eigen::VectorXd x0 = problem.stackFree(init);
    double initSpread = relStd(problem.segmentEnergies(x0));

    SolverConfig config;
    SolveResult r = solveConstrained(problem, x0, config);
    double finalSpread = relStd(problem.segmentEnergies(r.x));

    std::ostringstream os;
    os << "segment-energy rel std: init = " << initSpread << ", final = " << finalSpread
       << ", converged = " << r.report.converged;
    return {r.report.converged && finalSpread < 0.05 && initSpread >= 3.0 * finalSpread,
            os.str()};
}

// ---- criterion 8: isometric geodesic through the saddle ---------------

Outcome criterion8() {
    Mesh m = monkeySaddle(6, 0.35);
    SimplicialSurface s = m.surface();
    ConstraintSystem system(s);
    NricVector za = forwardMap(s, m.positions);
    NricVector zb(za.lengths, -za.angles);  // mirror image, same lengths
    MaterialParameters p;
    NonlinearEnergy energy(s, p);
    const int K = 4;
    GeodesicProblem problem(system, energy, za, zb, K);
    GeodesicPath init = initializeGeodesic(s, za, zb, K);
    Eigen::VectorXd x0 = problem.stackFree(init);

    // eliminate every length variable at the shared endpoint values
    FixedCoordinates fixed;
    const int shapeDim = s.nricDim();
    std::vector<double> values;
    for (int k = 1; k < K; ++k)
        for (int e = 0; e < s.edgeCount(); ++e) {
            fixed.indices.push_back((k - 1) * shapeDim + e);
            values.push_back(za.lengths[e]);
        }
    fixed.values = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
    EliminatedProblem reduced(problem, fixed);
    SolverConfig config;
    SolveResult r = solveConstrained(reduced, reduced.restrict(x0), config);
    GeodesicPath path = problem.unstack(reduced.embed(r.x));

    double lengthDrift = 0.0;
    for (int k = 1; k < K; ++k)
        lengthDrift = std::max(lengthDrift,
                               (path.shapes[k].lengths - za.lengths).cwiseAbs().maxCoeff());
    // the path actually moves through intermediate shapes
    double midAngle = (path.shapes[K / 2].angles - za.angles).cwiseAbs().maxCoeff();
    std::ostringstream os;
    os << "converged = " << r.report.converged << ", length drift = " << lengthDrift
       << " (exact elimination), mid-path angle move = " << midAngle;
    return {r.report.converged && lengthDrift == 0.0 && midAngle > 1e-3, os.str()};
}

// ---- criterion 9: rigidity classification -----------------------------

Outcome criterion9() {
    Mesh tet = tetrahedron();
    SimplicialSurface st = tet.surface();
    ConstraintSystem sysT(st);
    RigidityResult rt = rigidityTest(sysT, forwardMap(st, tet.positions));

    Mesh creased = foldedGrid(4, 4, 0.7, 2);
    SimplicialSurface sc = creased.surface();
    ConstraintSystem sysC(sc);
    NricVector zc = forwardMap(sc, creased.positions);
    RigidityResult rc = rigidityTest(sysC, zc);

    bool flexOk = false;
    double dqNorm = 1e300, lenNorm = 1e300;
    if (rc.variation) {
        const Eigen::VectorXd& w = *rc.variation;
        dqNorm = (Eigen::MatrixXd(sysC.jacobian(zc)) * w).norm();
        lenNorm = w.head(sc.edgeCount()).norm();
        flexOk = dqNorm <= 1e-6 && lenNorm <= 1e-6;
    }
    std::ostringstream os;
    os << "tetrahedron lambda0/sigma = " << rt.lambda0 / rt.sigmaMax
       << ", creased grid lambda0/sigma = " << rc.lambda0 / rc.sigmaMax
       << ", |DQ w| = " << dqNorm << ", |P_l w| = " << lenNorm;
    bool pass = rt.lambda0 / rt.sigmaMax > 1e-3 && rc.lambda0 < 1e-7 * rc.sigmaMax &&
                flexOk;
    return {pass, os.str()};
}

// ---- criterion 10: evaluation-time scaling ----------------------------

Outcome criterion10() {
    std::vector<int> sizes = {13, 26, 52};
    std::vector<double> perIter, edgeCounts;
    for (int n : sizes) {
        Mesh m = grid(n, n, 1.0 / n, [](double x, double y) {
            return 0.15 * std::sin(6.0 * x) * std::cos(5.0 * y);
        });
        SimplicialSurface s = m.surface();
        ConstraintSystem system(s);
        NricVector z = forwardMap(s, m.positions);
        NricVector off = z;
        off.angles.array() += 0.02;

        SolverConfig config;
        config.kMax = 1;
        config.jMax = 6;
        SolveResult r = projectToManifold(system, off, config);
        int iters = std::max(1, r.report.innerIterations);
        perIter.push_back(r.report.evalSeconds / iters);
        edgeCounts.push_back(s.edgeCount());
    }
    double r1 = perIter[1] / perIter[0], r2 = perIter[2] / perIter[1];
    double e1 = edgeCounts[1] / edgeCounts[0], e2 = edgeCounts[2] / edgeCounts[1];
    double ratioOfRatios = (r2 / e2) / (r1 / e1);
    std::ostringstream os;
    os << "eval s/iter at {" << edgeCounts[0] << ", " << edgeCounts[1] << ", "
       << edgeCounts[2] << "} edges = {" << perIter[0] << ", " << perIter[1] << ", "
       << perIter[2] << "}, ratio-of-ratios = " << ratioOfRatios;
    return {ratioOfRatios < 1.5, os.str()};
}

}  // namespace

int main() {
    int failures = 0;
    auto run = [&](int id, const std::string& name, Outcome outcome) {
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << id << " ("
                  << name << "): " << outcome.detail << "\n";
        if (!outcome.pass) ++failures;
    };

    run(1, "integrability soundness", criterion1());
    run(2, "derivative correctness", criterion2());
    run(3, "reconstruction round trip", criterion3());

    NricVector projected;
    std::unique_ptr<BlendSetup> setup;
    Outcome c5 = criterion5(&projected, setup);
    run(4, "hybrid robustness",
        criterion4(setup ? &projected : nullptr, setup ? &setup->system : nullptr));
    run(5, "constrained projection", c5);

    run(6, "exact isometric folding", criterion6());
    run(7, "geodesic constant speed", criterion7());
    run(8, "isometric geodesic", criterion8());
    run(9, "rigidity classification", criterion9());
    run(10, "evaluation-time scaling", criterion10());

    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT") << "\n";
    return failures;
}
