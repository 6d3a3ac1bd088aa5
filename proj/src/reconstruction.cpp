#include "reconstruction.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SVD>
#include <cmath>
#include <queue>
#include <sstream>

#include "geometry.hpp"

namespace nric {

namespace {

constexpr double kWeightSentinel = 1e20;

Eigen::Matrix3d rotX(double a) {
    Eigen::Matrix3d r;
    r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return r;
}

Eigen::Matrix3d rotZ(double a) {
    Eigen::Matrix3d r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
}

// Interior angles at the three corners of f; zeros (flagged) for faces
// violating a triangle inequality.
Eigen::Vector3d cornerAngles(const SimplicialSurface& s, const Eigen::VectorXd& lengths,
                             int f, bool& degenerate) {
    Eigen::Vector3d l = faceLengths(s, lengths, f);
    if (!admissibleTriple(l[0], l[1], l[2])) {
        degenerate = true;
        return Eigen::Vector3d::Zero();
    }
    // Corner m is flanked by face edges m and m-1; the opposite edge is m+1.
    Eigen::Vector3d g;
    g[0] = interiorAngle(l[0], l[2], l[1]);
    g[1] = interiorAngle(l[1], l[0], l[2]);
    g[2] = interiorAngle(l[2], l[1], l[0]);
    return g;
}

// In-plane angle (about the face normal) from the face's frame edge
// (corner 0 -> corner 1) to the canonical direction of face edge slot k.
double frameEdgeAngle(const SimplicialSurface& s, const Eigen::Vector3d& gamma, int f,
                      int k) {
    double phi = 0.0;
    if (k == 1) phi = M_PI - gamma[1];
    if (k == 2) phi = M_PI + gamma[0];
    int e = s.faceEdge(f, k);
    // Canonical edge rows are sorted; the in-face direction starts at corner k.
    if (s.faces()(f, k) != s.edges()(e, 0)) phi += M_PI;
    return phi;
}

int faceEdgeSlot(const SimplicialSurface& s, int f, int e) {
    for (int k = 0; k < 3; ++k)
        if (s.faceEdge(f, k) == e) return k;
    throw MeshTopologyError("edge not part of face");
}

// Per-vertex rotation residual |tr I_v - 3|; zero on the boundary.
Eigen::VectorXd vertexResiduals(const ConstraintSystem& system, const NricVector& z) {
    const SimplicialSurface& s = system.surface();
    Eigen::VectorXd perVertex = Eigen::VectorXd::Zero(s.vertexCount());
    Eigen::VectorXd r = system.rotationResidual(z);
    const auto& interior = s.interiorVertices();
    for (size_t i = 0; i < interior.size(); ++i) perVertex[interior[i]] = r[i];
    return perVertex;
}

}  // namespace

Eigen::VectorXd edgeWeights(const ConstraintSystem& system, const NricVector& z) {
    const SimplicialSurface& s = system.surface();
    Eigen::VectorXd perVertex = vertexResiduals(system, z);

    std::vector<bool> faceBad(s.faceCount(), false);
    for (int f = 0; f < s.faceCount(); ++f) {
        Eigen::Vector3d l = faceLengths(s, z.lengths, f);
        faceBad[f] = !admissibleTriple(l[0], l[1], l[2]);
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(s.edgeCount());
    for (int e : s.interiorEdges()) {
        if (faceBad[s.edgeFace(e, 0)] || faceBad[s.edgeFace(e, 1)]) {
            w[e] = kWeightSentinel;
            continue;
        }
        double a = std::min(perVertex[s.edges()(e, 0)], kWeightSentinel);
        double b = std::min(perVertex[s.edges()(e, 1)], kWeightSentinel);
        w[e] = 0.5 * (a + b);
    }
    return w;
}

Eigen::VectorXd preassembledWeights(const ConstraintSystem& system,
                                    const std::vector<NricVector>& samples) {
    if (samples.empty()) throw NricError("preassembledWeights: no samples");
    Eigen::VectorXd w = edgeWeights(system, samples[0]);
    for (size_t i = 1; i < samples.size(); ++i)
        w = w.cwiseMax(edgeWeights(system, samples[i]));
    return w;
}

TraversalTree buildTree(const SimplicialSurface& surface, const Eigen::VectorXd& weights,
                        TreeStrategy strategy, int root) {
    const int nf = surface.faceCount();
    if (root < 0 || root >= nf) throw MeshTopologyError("buildTree: root out of range");
    TraversalTree tree;
    tree.strategy = strategy;
    tree.root = root;
    tree.parentFace.assign(nf, -1);
    tree.parentEdge.assign(nf, -1);
    tree.order.reserve(nf);

    auto neighbors = [&](int f) {
        auto nb = surface.dualNeighbors(f);
        std::sort(nb.begin(), nb.end());
        return nb;
    };

    std::vector<bool> visited(nf, false);
    if (strategy == TreeStrategy::BFS) {
        std::queue<int> queue;
        queue.push(root);
        visited[root] = true;
        while (!queue.empty()) {
            int f = queue.front();
            queue.pop();
            tree.order.push_back(f);
            for (auto [g, e] : neighbors(f)) {
                if (visited[g]) continue;
                visited[g] = true;
                tree.parentFace[g] = f;
                tree.parentEdge[g] = e;
                queue.push(g);
            }
        }
    } else {
        // Prim (MST, preassembled) keys on the crossing edge weight; Dijkstra
        // (SPT) on the accumulated path weight. Same lazy heap otherwise.
        const bool spt = strategy == TreeStrategy::SPT;
        using Entry = std::tuple<double, int, int, int>;  // key, face, parent, edge
        std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
        std::vector<double> dist(nf, std::numeric_limits<double>::infinity());
        heap.emplace(0.0, root, -1, -1);
        dist[root] = 0.0;
        while (!heap.empty()) {
            auto [key, f, parent, edge] = heap.top();
            heap.pop();
            if (visited[f]) continue;
            visited[f] = true;
            tree.order.push_back(f);
            tree.parentFace[f] = parent;
            tree.parentEdge[f] = edge;
            for (auto [g, e] : neighbors(f)) {
                if (visited[g]) continue;
                double cand = spt ? key + weights[e] : weights[e];
                if (cand < dist[g]) {
                    dist[g] = cand;
                    heap.emplace(cand, g, f, e);
                }
            }
        }
    }
    if (static_cast<int>(tree.order.size()) != nf)
        throw MeshTopologyError("buildTree: dual graph not connected");
    return tree;
}

int defaultSeedFace(const ConstraintSystem& system, const NricVector& z) {
    const SimplicialSurface& s = system.surface();
    Eigen::VectorXd perVertex = vertexResiduals(system, z);
    int best = 0;
    double bestSum = std::numeric_limits<double>::infinity();
    for (int f = 0; f < s.faceCount(); ++f) {
        double sum = perVertex[s.faces()(f, 0)] + perVertex[s.faces()(f, 1)] +
                     perVertex[s.faces()(f, 2)];
        if (sum < bestSum) {
            bestSum = sum;
            best = f;
        }
    }
    return best;
}

VertexPositions traverseReconstruct(const SimplicialSurface& surface, const NricVector& z,
                                    const TraversalTree& tree, const FrameSeed& seed,
                                    ReconstructionReport* report) {
    const int nf = surface.faceCount();
    VertexPositions X = VertexPositions::Zero(surface.vertexCount(), 3);
    std::vector<bool> placed(surface.vertexCount(), false);
    std::vector<Eigen::Matrix3d> frames(nf);  // column frames
    std::vector<Eigen::Vector3d> gammas(nf);
    std::vector<bool> faceDegenerate(nf, false);

    if (report) {
        report->rootFace = tree.root;
        report->strategy = tree.strategy;
        report->traversalOrder.assign(nf, -1);
        report->degenerateFaces = 0;
        report->vertexConflicts = 0;
        report->maxVertexMismatch = 0.0;
    }

    auto placeFace = [&](int f) {
        Eigen::Vector3d l = faceLengths(surface, z.lengths, f);
        const Eigen::Matrix3d& G = frames[f];
        const Eigen::Vector3d& g = gammas[f];
        Eigen::Vector3d E1 = l[0] * G.col(0);
        Eigen::Vector3d E2 = l[1] * (G * Eigen::Vector3d(-std::cos(g[1]), std::sin(g[1]), 0));
        Eigen::Vector3d offsets[3] = {Eigen::Vector3d::Zero(), E1, E1 + E2};
        int anchor = -1;
        for (int m = 0; m < 3 && anchor < 0; ++m)
            if (placed[surface.faces()(f, m)]) anchor = m;
        Eigen::Vector3d base = anchor < 0
                                   ? seed.origin
                                   : Eigen::Vector3d(X.row(surface.faces()(f, anchor))) -
                                         offsets[anchor];
        for (int m = 0; m < 3; ++m) {
            int v = surface.faces()(f, m);
            Eigen::Vector3d p = base + offsets[m];
            if (!placed[v]) {
                X.row(v) = p;
                placed[v] = true;
            } else if (m != anchor) {
                double mismatch = (Eigen::Vector3d(X.row(v)) - p).norm();
                if (report && mismatch > 1e-9) {
                    ++report->vertexConflicts;
                    report->maxVertexMismatch = std::max(report->maxVertexMismatch, mismatch);
                }
            }
        }
    };

    int step = 0;
    for (int f : tree.order) {
        bool degenerate = false;
        gammas[f] = cornerAngles(surface, z.lengths, f, degenerate);
        faceDegenerate[f] = degenerate;
        if (degenerate && report) ++report->degenerateFaces;
        if (report) report->traversalOrder[f] = step;

        if (tree.parentFace[f] < 0) {
            frames[f] = seed.frame.transpose();  // seed rows -> basis columns
        } else {
            int parent = tree.parentFace[f];
            int e = tree.parentEdge[f];
            double theta = z.angles[surface.interiorEdgeIndex(e)];
            double sign = surface.edgeFace(e, 0) == parent ? 1.0 : -1.0;
            double phiParent =
                frameEdgeAngle(surface, gammas[parent], parent, faceEdgeSlot(surface, parent, e));
            double phiChild = frameEdgeAngle(surface, gammas[f], f, faceEdgeSlot(surface, f, e));
            frames[f] = frames[parent] * rotZ(phiParent) * rotX(sign * theta) * rotZ(-phiChild);
            if (++step % 64 == 0) {
                // Polar re-orthonormalization against rotation drift.
                Eigen::JacobiSVD<Eigen::Matrix3d> svd(
                    frames[f], Eigen::ComputeFullU | Eigen::ComputeFullV);
                frames[f] = svd.matrixU() * svd.matrixV().transpose();
            }
        }
        placeFace(f);
    }
    return X;
}

VertexPositions variationalRefine(const SimplicialSurface& surface, const NricVector& z,
                                  const VertexPositions& X0, const QuadraticWeights& weights,
                                  const MaterialParameters& params, int maxIter,
                                  ReconstructionReport* report) {
    const int nv = surface.vertexCount();
    const int dim = surface.nricDim();
    const int ne = surface.edgeCount();
    Eigen::VectorXd rowScale(dim);
    rowScale.head(ne) = weights.alpha.cwiseSqrt();
    rowScale.tail(dim - ne) = params.delta * weights.beta.cwiseSqrt();

    auto residual = [&](const VertexPositions& X) {
        Eigen::VectorXd r = forwardMap(surface, X).stacked() - z.stacked();
        return rowScale.cwiseProduct(r).eval();
    };

    VertexPositions X = X0;
    Eigen::VectorXd r = residual(X);
    double obj = r.squaredNorm();
    for (int it = 0; it < maxIter; ++it) {
        Eigen::SparseMatrix<double> jac = forwardMapJacobian(surface, X);
        Eigen::SparseMatrix<double> wj = rowScale.asDiagonal() * jac;
        Eigen::SparseMatrix<double> normal = Eigen::SparseMatrix<double>(wj.transpose() * wj);
        double rho = 1e-8 * normal.diagonal().sum() / normal.rows();
        Eigen::SparseMatrix<double> identity(normal.rows(), normal.cols());
        identity.setIdentity();
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(normal + rho * identity);
        if (llt.info() != Eigen::Success)
            throw NricError("variationalRefine: normal equations not factorizable");
        Eigen::VectorXd dx = llt.solve(-wj.transpose() * r);

        double t = 1.0;
        bool accepted = false;
        while (t >= 1e-12) {
            VertexPositions Xt = X;
            for (int v = 0; v < nv; ++v)
                Xt.row(v) += t * dx.segment<3>(3 * v).transpose();
            try {
                Eigen::VectorXd rt = residual(Xt);
                double objT = rt.squaredNorm();
                if (objT <= obj) {
                    X = Xt;
                    r = rt;
                    obj = objT;
                    accepted = true;
                    break;
                }
            } catch (const DegenerateFace&) {
                // Step left the generic region; halve and retry.
            }
            t *= 0.5;
        }
        if (!accepted) break;
        if (report) ++report->gaussNewtonSteps;
    }
    return X;
}

std::string ReconstructionReport::text() const {
    std::ostringstream os;
    const char* name = strategy == TreeStrategy::BFS   ? "bfs"
                       : strategy == TreeStrategy::MST ? "mst"
                       : strategy == TreeStrategy::SPT ? "spt"
                                                       : "pre";
    os << "strategy = " << name << "\n"
       << "root_face = " << rootFace << "\n"
       << "max_violation = " << maxViolation << "\n"
       << "mean_violation = " << meanViolation << "\n"
       << "degenerate_faces = " << degenerateFaces << "\n"
       << "vertex_conflicts = " << vertexConflicts << "\n"
       << "max_vertex_mismatch = " << maxVertexMismatch << "\n"
       << "gauss_newton_steps = " << gaussNewtonSteps << "\n"
       << "final_residual = " << finalResidual << "\n";
    return os.str();
}

std::pair<VertexPositions, ReconstructionReport> reconstruct(const ConstraintSystem& system,
                                                             const NricVector& z,
                                                             const ReconstructOptions& options) {
    const SimplicialSurface& s = system.surface();
    ReconstructionReport report;

    Eigen::VectorXd w;
    if (options.strategy == TreeStrategy::Preassembled) {
        std::vector<NricVector> samples = options.samples;
        if (samples.empty()) samples.push_back(z);
        w = preassembledWeights(system, samples);
    } else {
        w = edgeWeights(system, z);
    }

    Eigen::VectorXd perVertex = vertexResiduals(system, z);
    report.maxViolation = perVertex.size() > 0 ? perVertex.maxCoeff() : 0.0;
    report.meanViolation = perVertex.size() > 0 ? perVertex.mean() : 0.0;

    int root = options.seed.face >= 0 ? options.seed.face : defaultSeedFace(system, z);
    FrameSeed seed = options.seed;
    seed.face = root;
    TraversalTree tree = buildTree(s, w, options.strategy, root);
    VertexPositions X = traverseReconstruct(s, z, tree, seed, &report);

    if (options.gaussNewtonSteps > 0) {
        NricVector reference = z;
        if (!triangleInequalities(s, reference).allStrictlyPositive)
            reference = forwardMap(s, X);
        QuadraticWeights qw = quadraticWeights(s, reference);
        X = variationalRefine(s, z, X, qw, options.params, options.gaussNewtonSteps, &report);
    }
    report.finalResidual = (forwardMap(s, X).stacked() - z.stacked()).cwiseAbs().maxCoeff();
    return {X, report};
}

}  // namespace nric
