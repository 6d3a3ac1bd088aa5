#pragma once

#include <functional>
#include <random>

#include "geometry.hpp"
#include "mesh.hpp"

namespace nric::testing {

struct Mesh {
    Eigen::MatrixXi faces;
    VertexPositions positions;

    SimplicialSurface surface() const {
        return SimplicialSurface(static_cast<int>(positions.rows()), faces);
    }
};

// Regular tetrahedron with unit edge length.
Mesh tetrahedron();

// Icosahedron with unit circumradius.
Mesh icosahedron();

// Icosphere: icosahedron subdivided n times, projected to the unit sphere.
Mesh icosphere(int subdivisions);

// Flat rectangular grid in the xy-plane, (nx+1) x (ny+1) vertices with
// spacing dx, optionally displaced in z by height(x, y).
Mesh grid(int nx, int ny, double dx = 1.0,
          const std::function<double(double, double)>& height = nullptr);

// Grid bent cylindrically around the y-axis by total angle `angle`.
Mesh bentPlate(int nx, int ny, double angle, double dx = 1.0);

// Monkey saddle patch z = s (x^3 - 3 x y^2) over [-1,1]^2.
Mesh monkeySaddle(int n, double s);

// Flat torus embedding (not simply connected; used for rejection tests).
Mesh torus(int m, int n);

// Centers positions and removes net scale drift; returns RMS distance after
// optimal rigid alignment of A onto B (orthogonal Procrustes incl. reflection
// guard).
double procrustesRms(const VertexPositions& A, const VertexPositions& B);

// Random interior NRIC perturbation that keeps the point feasible.
NricVector perturbFeasible(const SimplicialSurface& s, const NricVector& z, double scale,
                           std::mt19937& rng);

}  // namespace nric::testing
