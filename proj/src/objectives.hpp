#pragma once

#include "constraints.hpp"
#include "energies.hpp"
#include "solver.hpp"

namespace nric {

struct EndpointInfeasible : NricError {
    using NricError::NricError;
};

// Single-shape problem min sum_i w_i W[z_i, z] s.t. Q(z) = 0 over the
// stacked NRIC vector. Covers dissimilarity/projection (one reference) and
// weighted elastic averages (convex weights).
class ShapeProblem : public ConstrainedProblem {
public:
    ShapeProblem(const ConstraintSystem& system, const DeformationEnergy& energy,
                 std::vector<NricVector> references, std::vector<double> weights);

    int dim() const override { return system_->surface().nricDim(); }
    int constraintDim() const override { return system_->constraintDim(); }
    bool feasible(const Eigen::VectorXd& x) const override;
    double energyValue(const Eigen::VectorXd& x) const override;
    void energyDerivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                           Eigen::SparseMatrix<double>& hess) const override;
    Eigen::VectorXd constraintResidual(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> constraintJacobian(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> constraintHessianContraction(
        const Eigen::VectorXd& x, const Eigen::VectorXd& w) const override;

private:
    const ConstraintSystem* system_;
    const DeformationEnergy* energy_;
    std::vector<NricVector> references_;
    std::vector<double> weights_;
};

// Discrete path z_0 ... z_K; endpoints fixed, the rest free.
struct GeodesicPath {
    int K = 0;
    std::vector<NricVector> shapes;  // K + 1 entries
};

// Componentwise linear blend; lengths fall back to a log-domain blend when a
// plain blend violates a triangle inequality.
GeodesicPath initializeGeodesic(const SimplicialSurface& surface, const NricVector& zA,
                                const NricVector& zB, int K);

// Path energy E = K sum_k W[z_{k-1}, z_k] over the stacked free shapes
// z_1 ... z_{K-1}, with the integrability constraints applied per free shape
// (block-diagonal constraint Jacobian, block-tridiagonal energy Hessian).
class GeodesicProblem : public ConstrainedProblem {
public:
    GeodesicProblem(const ConstraintSystem& system, const DeformationEnergy& energy,
                    NricVector z0, NricVector zK, int K);

    int dim() const override { return (K_ - 1) * shapeDim_; }
    int constraintDim() const override { return (K_ - 1) * system_->constraintDim(); }
    bool feasible(const Eigen::VectorXd& x) const override;
    double energyValue(const Eigen::VectorXd& x) const override;
    void energyDerivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                           Eigen::SparseMatrix<double>& hess) const override;
    Eigen::VectorXd constraintResidual(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> constraintJacobian(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> constraintHessianContraction(
        const Eigen::VectorXd& x, const Eigen::VectorXd& w) const override;

    Eigen::VectorXd stackFree(const GeodesicPath& path) const;
    GeodesicPath unstack(const Eigen::VectorXd& x) const;
    // Per-segment energies W[z_{k-1}, z_k], k = 1..K.
    Eigen::VectorXd segmentEnergies(const Eigen::VectorXd& x) const;

private:
    std::vector<NricVector> assemble(const Eigen::VectorXd& x) const;

    const ConstraintSystem* system_;
    const DeformationEnergy* energy_;
    NricVector z0_, zK_;
    int K_ = 0;
    int shapeDim_ = 0;
};

// Solves (OPT) with E = W_q[zRef, .] (weights frozen at zRef) from z0; the
// usual back-projection onto the constraint manifold.
SolveResult projectToManifold(const ConstraintSystem& system, const NricVector& z0,
                              const SolverConfig& config,
                              const MaterialParameters& params = {});

// Step z <- z + h (0, w_theta) along an infinitesimal isometric variation,
// then re-project. h defaults to 0.05 * mean |theta| when passed as 0.
NricVector isometricExtrapolate(const ConstraintSystem& system, const NricVector& z,
                                const Eigen::VectorXd& variation, double h,
                                const SolverConfig& config,
                                const MaterialParameters& params = {});

}  // namespace nric
