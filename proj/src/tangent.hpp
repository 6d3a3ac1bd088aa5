#pragma once

#include <optional>

#include "constraints.hpp"

namespace nric {

// Orthonormal basis of ker DQ(z), the implicit tangent space at z.
struct TangentBasis {
    Eigen::MatrixXd basis;   // dim(z) x k, orthonormal columns
    int rank = 0;            // rank of DQ(z)
    double sigmaMax = 0.0;   // largest singular value of DQ(z)
};

// Kernel basis by dense SVD; rank threshold max(dims) * eps * sigma_max.
// Throws NotOnManifold if |Q(z)|_inf exceeds integrabilityTol.
TangentBasis tangentBasis(const ConstraintSystem& system, const NricVector& z,
                          double integrabilityTol = 1e-8);

struct RigidityResult {
    double lambda0 = 0.0;     // smallest singular value of (B_T | B_theta)
    double sigmaMax = 0.0;    // largest singular value of the combined matrix
    int tangentDim = 0;
    bool candidateSubspaceEmpty = false;  // selector excluded every angle column
    // Present when lambda0 < threshold: unit variation w in T_z M with zero
    // length components (an infinitesimal isometric variation).
    std::optional<Eigen::VectorXd> variation;
};

// Infinitesimal-rigidity test: smallest singular value of the column-stacked
// matrix (B_{T_z M} | B_theta). An optional selector restricts the candidate
// angle subspace: angleSelector[j] == false removes interior-edge angle j
// (models additional fixed-angle constraints). Default threshold for the
// zero-decision is 1e-7 * sigma_max.
RigidityResult rigidityTest(const ConstraintSystem& system, const NricVector& z,
                            const std::vector<bool>& angleSelector = {},
                            double integrabilityTol = 1e-8,
                            double zeroThresholdFactor = 1e-7);

}  // namespace nric
