#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nric {

struct NricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MeshTopologyError : NricError {
    using NricError::NricError;
};
struct DegenerateFace : NricError {
    using NricError::NricError;
};
struct TriangleInequalityViolated : NricError {
    using NricError::NricError;
};
struct NotOnManifold : NricError {
    using NricError::NricError;
};
struct InfeasiblePoint : NricError {
    using NricError::NricError;
};
struct ParseError : NricError {
    using NricError::NricError;
};

// Shared sentinel encoding an infinite energy / constraint value.
constexpr double kInfSentinel = 1e300;

using VertexPositions = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Cyclic fan of faces and edges around an interior vertex. Edge i is shared
// by faces i-1 and i (mod n); face i has fan edges (edge i, edge i+1) at the
// center and oppositeEdge[i] across from it.
struct VertexFan {
    int vertex = -1;
    std::vector<int> faces;
    std::vector<int> edges;          // global edge indices, all interior
    std::vector<int> oppositeEdges;  // per face, the edge not touching the center
};

// Immutable connectivity of an oriented, simply connected triangle mesh.
class SimplicialSurface {
public:
    // Builds connectivity from consistently oriented triangles. Throws
    // MeshTopologyError on non-manifold, non-orientable, disconnected, or
    // non-simply-connected input.
    SimplicialSurface(int vertexCount, const Eigen::MatrixXi& faces);

    int vertexCount() const { return numVertices_; }
    int edgeCount() const { return static_cast<int>(edges_.rows()); }
    int faceCount() const { return static_cast<int>(faces_.rows()); }
    int interiorEdgeCount() const { return static_cast<int>(interiorEdges_.size()); }

    const Eigen::MatrixXi& faces() const { return faces_; }
    // Canonical edge list, each row (v0, v1) with v0 < v1 for interior edges;
    // boundary edges are oriented so that side 0 always carries a face.
    const Eigen::MatrixXi& edges() const { return edges_; }
    // faceEdge(f, k): edge between face corners k and k+1 mod 3.
    int faceEdge(int f, int k) const { return faceEdges_(f, k); }
    // Face adjacent to edge e containing the directed edge v0->v1 (side 0)
    // resp. v1->v0 (side 1); -1 if absent (boundary).
    int edgeFace(int e, int side) const { return edgeFaces_(e, side); }
    // Vertex of edgeFace(e, side) opposite to e; -1 if absent.
    int edgeOppositeVertex(int e, int side) const { return edgeOpposite_(e, side); }

    bool isBoundaryEdge(int e) const { return edgeFaces_(e, 1) < 0; }
    bool isBoundaryVertex(int v) const { return boundaryVertex_[v]; }
    bool isClosed() const { return interiorEdgeCount() == edgeCount(); }

    // Maps edge index to its position among interior edges; -1 for boundary.
    int interiorEdgeIndex(int e) const { return interiorEdgeIndex_[e]; }
    const std::vector<int>& interiorEdges() const { return interiorEdges_; }

    const std::vector<int>& interiorVertices() const { return interiorVertices_; }
    const std::vector<VertexFan>& fans() const { return fans_; }
    // Fan of interior vertex v; throws for boundary vertices.
    const VertexFan& fan(int v) const;

    // Dual-graph neighbors of face f as (neighbor face, shared edge) pairs.
    const std::vector<std::pair<int, int>>& dualNeighbors(int f) const {
        return dualGraph_[f];
    }

    int eulerCharacteristic() const {
        return numVertices_ - edgeCount() + faceCount();
    }
    int boundaryLoopCount() const { return boundaryLoops_; }

    // Edge index of the undirected pair (a, b); -1 if not present.
    int findEdge(int a, int b) const;

    // Dimension of the NRIC vector: lengths plus interior-edge angles.
    int nricDim() const { return edgeCount() + interiorEdgeCount(); }

private:
    int numVertices_ = 0;
    Eigen::MatrixXi faces_;
    Eigen::MatrixXi edges_;
    Eigen::MatrixXi faceEdges_;
    Eigen::MatrixXi edgeFaces_;
    Eigen::MatrixXi edgeOpposite_;
    std::vector<int> interiorEdgeIndex_;
    std::vector<int> interiorEdges_;
    std::vector<bool> boundaryVertex_;
    std::vector<int> interiorVertices_;
    std::vector<int> fanIndex_;  // per vertex, index into fans_ or -1
    std::vector<VertexFan> fans_;
    std::vector<std::vector<std::pair<int, int>>> dualGraph_;
    std::map<std::pair<int, int>, int> edgeLookup_;
    int boundaryLoops_ = 0;
};

// Stacked edge lengths and interior-edge dihedral angles z = (l, theta).
struct NricVector {
    Eigen::VectorXd lengths;
    Eigen::VectorXd angles;

    NricVector() = default;
    NricVector(Eigen::VectorXd l, Eigen::VectorXd a)
        : lengths(std::move(l)), angles(std::move(a)) {}

    static NricVector zero(const SimplicialSurface& s) {
        return NricVector(Eigen::VectorXd::Zero(s.edgeCount()),
                          Eigen::VectorXd::Zero(s.interiorEdgeCount()));
    }

    int dim() const { return static_cast<int>(lengths.size() + angles.size()); }

    Eigen::VectorXd stacked() const {
        Eigen::VectorXd z(dim());
        z << lengths, angles;
        return z;
    }
    static NricVector fromStacked(const SimplicialSurface& s, const Eigen::VectorXd& z) {
        return NricVector(z.head(s.edgeCount()), z.tail(s.interiorEdgeCount()));
    }
};

}  // namespace nric
