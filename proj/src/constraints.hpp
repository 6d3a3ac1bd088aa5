#pragma once

#include <Eigen/Sparse>

#include "mesh.hpp"
#include "quaternion.hpp"

namespace nric {

// Quaternion integrability constraints Q(z) in R^{3|V0|}: for every interior
// vertex the vector part of the ordered Hamilton product of fan transition
// quaternions must vanish. Provides the residual, its sparse Jacobian, and
// the weighted Hessian contraction needed by second-order solvers.
class ConstraintSystem {
public:
    explicit ConstraintSystem(const SimplicialSurface& surface);

    const SimplicialSurface& surface() const { return *surface_; }
    int constraintDim() const { return 3 * static_cast<int>(surface_->interiorVertices().size()); }

    // Residual Q(z). Blocks whose fan violates a triangle inequality are set
    // to the infinity sentinel so a line search can reject the iterate.
    Eigen::VectorXd residual(const NricVector& z) const;

    bool feasible(const NricVector& z) const;

    // Sparse Jacobian DQ(z), rows 3|V0|, cols dim(z). Throws
    // TriangleInequalityViolated on infeasible z.
    Eigen::SparseMatrix<double> jacobian(const NricVector& z) const;

    // Weighted Hessian contraction sum_v sum_m w_{v,m} D^2 (Q_v)_m, symmetric.
    Eigen::SparseMatrix<double> hessianContraction(const NricVector& z,
                                                   const Eigen::VectorXd& weights) const;

    // |tr I_v(z) - 3| = 4 |vec(p)|^2 per interior vertex; infeasible fans map
    // to a large sentinel.
    Eigen::VectorXd rotationResidual(const NricVector& z) const;

    // Loop rotation product of the fan of interior vertex v (unit quaternion).
    Quatd fanProduct(const NricVector& z, int v) const;

private:
    struct FanEntry {
        int thetaCol;   // stacked index of the dihedral angle at e_i
        int lenA;       // edge index e_i
        int lenB;       // edge index e_{i+1}
        int lenC;       // opposite edge of face f_i
    };
    struct FanData {
        int vertex;
        std::vector<FanEntry> entries;
    };

    bool fanFeasible(const NricVector& z, const FanData& fan) const;
    std::vector<Quatd> fanQuats(const NricVector& z, const FanData& fan) const;

    const SimplicialSurface* surface_;
    std::vector<FanData> fans_;
};

}  // namespace nric
