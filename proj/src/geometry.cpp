#include "geometry.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "autodiff.hpp"

namespace nric {

namespace {

// 3-vector over an autodiff scalar.
template <typename T>
struct V3 {
    T x, y, z;
};

template <typename T>
V3<T> operator-(const V3<T>& a, const V3<T>& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}
template <typename T>
T dot(const V3<T>& a, const V3<T>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}
template <typename T>
V3<T> cross(const V3<T>& a, const V3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <typename T>
T norm(const V3<T>& a) {
    return sqrt(dot(a, a));
}
template <typename T>
V3<T> normalized(const V3<T>& a) {
    T n = norm(a);
    return {a.x / n, a.y / n, a.z / n};
}

// Signed dihedral angle of the hinge (x0, x1 | p2, p3): theta =
// atan2(<N x N', e>, <N, N'>) with e the unit edge direction in the face
// where it appears positively oriented.
template <typename T>
T hingeAngle(const V3<T>& x0, const V3<T>& x1, const V3<T>& p2, const V3<T>& p3) {
    V3<T> e = x1 - x0;
    V3<T> n1 = normalized(cross(e, p2 - x0));
    V3<T> n2 = normalized(cross(p3 - x1, e));
    // n2 built with reversed edge: (x0-x1) x (p3-x1) = (p3-x1) x e ... sign
    // fixed by construction below.
    V3<T> eh = normalized(e);
    return atan2(dot(cross(n1, n2), eh), dot(n1, n2));
}

V3<double> point(const VertexPositions& X, int v) {
    return {X(v, 0), X(v, 1), X(v, 2)};
}

}  // namespace

TriangleInequalities triangleInequalities(const SimplicialSurface& surface,
                                          const NricVector& z) {
    const int nf = surface.faceCount();
    TriangleInequalities out;
    out.values.resize(nf, 3);
    out.allStrictlyPositive = true;
    for (int f = 0; f < nf; ++f) {
        Eigen::Vector3d l = faceLengths(surface, z.lengths, f);
        out.values(f, 0) = l[0] + l[1] - l[2];
        out.values(f, 1) = l[0] - l[1] + l[2];
        out.values(f, 2) = -l[0] + l[1] + l[2];
        if (!(out.values(f, 0) > 0 && out.values(f, 1) > 0 && out.values(f, 2) > 0))
            out.allStrictlyPositive = false;
    }
    return out;
}

double interiorAngle(double a, double b, double c) {
    if (!admissibleTriple(a, b, c))
        throw TriangleInequalityViolated("interiorAngle: inadmissible length triple");
    double q = (a * a + b * b - c * c) / (2.0 * a * b);
    q = std::clamp(q, -1.0, 1.0);
    return std::acos(q);
}

double faceArea(double a, double b, double c) {
    if (!admissibleTriple(a, b, c))
        throw TriangleInequalityViolated("faceArea: inadmissible length triple");
    double det = 0.25 * (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
    return 0.5 * std::sqrt(det);
}

Eigen::Vector3d faceLengths(const SimplicialSurface& surface, const Eigen::VectorXd& lengths,
                            int f) {
    return Eigen::Vector3d(lengths[surface.faceEdge(f, 0)], lengths[surface.faceEdge(f, 1)],
                           lengths[surface.faceEdge(f, 2)]);
}

double dihedralAngle(const SimplicialSurface& surface, const VertexPositions& X, int e) {
    int v0 = surface.edges()(e, 0), v1 = surface.edges()(e, 1);
    int p2 = surface.edgeOppositeVertex(e, 0);
    int p3 = surface.edgeOppositeVertex(e, 1);
    return hingeAngle(point(X, v0), point(X, v1), point(X, p2), point(X, p3));
}

NricVector forwardMap(const SimplicialSurface& surface, const VertexPositions& X) {
    const auto& F = surface.faces();
    for (int f = 0; f < surface.faceCount(); ++f) {
        Eigen::Vector3d a = X.row(F(f, 0)), b = X.row(F(f, 1)), c = X.row(F(f, 2));
        if (((b - a).cross(c - a)).norm() <= 0)
            throw DegenerateFace("forwardMap: zero-area face");
    }
    NricVector z = NricVector::zero(surface);
    for (int e = 0; e < surface.edgeCount(); ++e) {
        int v0 = surface.edges()(e, 0), v1 = surface.edges()(e, 1);
        z.lengths[e] = (X.row(v1) - X.row(v0)).norm();
        int ie = surface.interiorEdgeIndex(e);
        if (ie >= 0) z.angles[ie] = dihedralAngle(surface, X, e);
    }
    return z;
}

Eigen::SparseMatrix<double> forwardMapJacobian(const SimplicialSurface& surface,
                                               const VertexPositions& X) {
    const int ne = surface.edgeCount();
    const int dim = surface.nricDim();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(6 * ne + 12 * surface.interiorEdgeCount());

    for (int e = 0; e < ne; ++e) {
        int v0 = surface.edges()(e, 0), v1 = surface.edges()(e, 1);
        Eigen::Vector3d d = X.row(v1) - X.row(v0);
        double l = d.norm();
        if (l <= 0) throw DegenerateFace("forwardMapJacobian: zero-length edge");
        d /= l;
        for (int k = 0; k < 3; ++k) {
            trip.emplace_back(e, 3 * v1 + k, d[k]);
            trip.emplace_back(e, 3 * v0 + k, -d[k]);
        }

        int ie = surface.interiorEdgeIndex(e);
        if (ie < 0) continue;
        int p2 = surface.edgeOppositeVertex(e, 0);
        int p3 = surface.edgeOppositeVertex(e, 1);
        std::array<int, 4> verts = {v0, v1, p2, p3};
        using J = D1<12>;
        std::array<V3<J>, 4> pts;
        for (int i = 0; i < 4; ++i)
            pts[i] = {J::variable(X(verts[i], 0), 3 * i), J::variable(X(verts[i], 1), 3 * i + 1),
                      J::variable(X(verts[i], 2), 3 * i + 2)};
        J theta = hingeAngle(pts[0], pts[1], pts[2], pts[3]);
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 3; ++k)
                trip.emplace_back(ne + ie, 3 * verts[i] + k, theta.g[3 * i + k]);
    }

    Eigen::SparseMatrix<double> jac(dim, 3 * surface.vertexCount());
    jac.setFromTriplets(trip.begin(), trip.end());
    return jac;
}

}  // namespace nric
