#pragma once

#include "constraints.hpp"
#include "energies.hpp"

namespace nric {

enum class TreeStrategy { BFS, MST, SPT, Preassembled };

// Rooted spanning tree of the dual graph in traversal order.
struct TraversalTree {
    TreeStrategy strategy = TreeStrategy::BFS;
    int root = 0;
    std::vector<int> parentFace;  // per face; -1 at the root
    std::vector<int> parentEdge;  // primal edge crossed to enter the face; -1 at root
    std::vector<int> order;       // faces in traversal order, order[0] == root
};

// Dual-edge weights w_e = (|tr I_v - 3| + |tr I_v' - 3|)/2 per edge (indexed
// by primal edge; boundary edges unused and zero). Boundary endpoints
// contribute 0; edges touching a triangle-inequality-violating face get a
// large sentinel so those faces are visited as late as possible.
Eigen::VectorXd edgeWeights(const ConstraintSystem& system, const NricVector& z);

// Componentwise maximum of per-sample weights.
Eigen::VectorXd preassembledWeights(const ConstraintSystem& system,
                                    const std::vector<NricVector>& samples);

// BFS ignores weights; MST is Prim, SPT is Dijkstra; ties broken by
// ascending face index. Preassembled trees use MST on combined weights.
TraversalTree buildTree(const SimplicialSurface& surface, const Eigen::VectorXd& weights,
                        TreeStrategy strategy, int root);

// Anchor for the rigid gauge: position of the face's first corner and the
// face frame (rows: unit first edge, in-plane perpendicular, normal).
struct FrameSeed {
    int face = -1;  // -1 selects the most-integrable face automatically
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
};

struct ReconstructionReport {
    TreeStrategy strategy = TreeStrategy::BFS;
    int rootFace = 0;
    double maxViolation = 0.0;   // max |tr I_v - 3| over interior vertices
    double meanViolation = 0.0;
    int degenerateFaces = 0;     // faces traversed with gamma = 0 substitute
    int vertexConflicts = 0;     // re-visited vertices with placement mismatch
    double maxVertexMismatch = 0.0;
    int gaussNewtonSteps = 0;
    double finalResidual = 0.0;  // |Z(X) - z|_inf after the pipeline
    std::vector<int> traversalOrder;  // per-face visit rank

    std::string text() const;
};

// Seed face: lowest index among faces with minimal incident integrability
// violation.
int defaultSeedFace(const ConstraintSystem& system, const NricVector& z);

// Frame-based tree traversal; exact right inverse of the forward map for
// integrable z.
VertexPositions traverseReconstruct(const SimplicialSurface& surface, const NricVector& z,
                                    const TraversalTree& tree, const FrameSeed& seed,
                                    ReconstructionReport* report = nullptr);

// Gauss-Newton on the weighted coordinate residuals r(X) with Tikhonov
// damping; steps are halved when the quadratic proximity would increase or a
// face degenerates.
VertexPositions variationalRefine(const SimplicialSurface& surface, const NricVector& z,
                                  const VertexPositions& X0, const QuadraticWeights& weights,
                                  const MaterialParameters& params, int maxIter = 1,
                                  ReconstructionReport* report = nullptr);

struct ReconstructOptions {
    TreeStrategy strategy = TreeStrategy::MST;
    int gaussNewtonSteps = 1;  // 0 disables refinement
    FrameSeed seed;
    MaterialParameters params;
    std::vector<NricVector> samples;  // extra samples for preassembled weights
};

// Hybrid pipeline: weights -> tree -> traversal -> refinement.
std::pair<VertexPositions, ReconstructionReport> reconstruct(const ConstraintSystem& system,
                                                             const NricVector& z,
                                                             const ReconstructOptions& options);

}  // namespace nric
