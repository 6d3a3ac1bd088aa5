#pragma once

#include <Eigen/Sparse>

#include "mesh.hpp"

namespace nric {

// Triangle inequality triple T_f(l) = (a+b-c, a-b+c, -a+b+c) per face.
struct TriangleInequalities {
    Eigen::MatrixX3d values;  // one row per face
    bool allStrictlyPositive = false;
};

TriangleInequalities triangleInequalities(const SimplicialSurface& surface,
                                          const NricVector& z);

// Strict triangle inequality for a single length triple.
inline bool admissibleTriple(double a, double b, double c) {
    return a + b > c && a - b < c && b - a < c && a > 0 && b > 0 && c > 0;
}

// Interior angle opposite to c, arccos((a^2+b^2-c^2)/(2ab)).
double interiorAngle(double a, double b, double c);

// Triangle area from edge lengths by Heron's formula.
double faceArea(double a, double b, double c);

// Lengths of the three edges of face f in faceEdge order.
Eigen::Vector3d faceLengths(const SimplicialSurface& surface, const Eigen::VectorXd& lengths,
                            int f);

// Forward map Z(X) = (l(X), theta(X)). Throws DegenerateFace on zero-area input.
NricVector forwardMap(const SimplicialSurface& surface, const VertexPositions& X);

// Sparse Jacobian of the forward map; rows ordered as the stacked NRIC vector
// (lengths then angles), columns as the flattened 3|V| coordinates (vertex-major).
Eigen::SparseMatrix<double> forwardMapJacobian(const SimplicialSurface& surface,
                                               const VertexPositions& X);

// Signed dihedral angle at interior edge e of the embedded mesh.
double dihedralAngle(const SimplicialSurface& surface, const VertexPositions& X, int e);

}  // namespace nric
