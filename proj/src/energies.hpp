#pragma once

#include <Eigen/Sparse>
#include <memory>

#include "mesh.hpp"

namespace nric {

struct ReferenceDegenerate : NricError {
    using NricError::NricError;
};

struct MaterialParameters {
    double mu = 1.0;      // membrane shear weight
    double lambda = 1.0;  // membrane bulk weight
    double delta = 1e-2;  // shell thickness; bending enters with delta^2
};

enum class WeightRecipe {
    InverseSquaredLength,  // alpha_e = l_e^-2,     beta_e = l_e^2 / d_e
    AreaWeightedLength,    // alpha_e = d_e l_e^-2, beta_e = l_e^2 / d_e
};

// Per-edge weights of the quadratic dissimilarity, frozen at a reference.
struct QuadraticWeights {
    Eigen::VectorXd alpha;  // per edge
    Eigen::VectorXd beta;   // per interior edge
    NricVector reference;
    WeightRecipe recipe = WeightRecipe::InverseSquaredLength;
};

QuadraticWeights quadraticWeights(const SimplicialSurface& surface, const NricVector& zbar,
                                  WeightRecipe recipe = WeightRecipe::InverseSquaredLength);

// Single-triangle membrane contribution a_f * W_mem(G^hat). The undeformed
// triple (a, b, c) must be strictly admissible; an inadmissible deformed
// triple yields the infinity sentinel.
double localMembrane(double a, double b, double c, double ta, double tb, double tc,
                     const MaterialParameters& params);

double membraneEnergy(const SimplicialSurface& surface, const NricVector& z,
                      const NricVector& zt, const MaterialParameters& params);
double bendingEnergy(const SimplicialSurface& surface, const NricVector& z,
                     const NricVector& zt, const MaterialParameters& params);
// W_nl = W_mem + delta^2 W_bend.
double nonlinearEnergy(const SimplicialSurface& surface, const NricVector& z,
                       const NricVector& zt, const MaterialParameters& params);
double quadraticEnergy(const SimplicialSurface& surface, const NricVector& z,
                       const NricVector& zt, const QuadraticWeights& weights,
                       const MaterialParameters& params);

// Value and derivative blocks of a dissimilarity W[z, zt] over stacked NRIC
// vectors. Suffix 1 refers to the first (undeformed) argument, 2 to the
// second; hess12 has first-argument rows and second-argument columns.
struct EnergyDerivatives {
    double value = 0.0;
    Eigen::VectorXd grad2;
    Eigen::SparseMatrix<double> hess22;
    Eigen::VectorXd grad1;
    Eigen::SparseMatrix<double> hess11;
    Eigen::SparseMatrix<double> hess12;
};

// Dissimilarity measure between NRIC with derivatives in both arguments.
class DeformationEnergy {
public:
    virtual ~DeformationEnergy() = default;
    virtual const SimplicialSurface& surface() const = 0;
    // Infinite (sentinel) for infeasible second argument, never NaN.
    virtual double value(const NricVector& z, const NricVector& zt) const = 0;
    // Throws InfeasiblePoint when the value is the sentinel.
    virtual EnergyDerivatives derivatives(const NricVector& z, const NricVector& zt,
                                          bool withFirstArgument) const = 0;
};

class NonlinearEnergy : public DeformationEnergy {
public:
    NonlinearEnergy(const SimplicialSurface& surface, MaterialParameters params)
        : surface_(&surface), params_(params) {}
    const SimplicialSurface& surface() const override { return *surface_; }
    const MaterialParameters& params() const { return params_; }
    double value(const NricVector& z, const NricVector& zt) const override;
    EnergyDerivatives derivatives(const NricVector& z, const NricVector& zt,
                                  bool withFirstArgument) const override;

private:
    const SimplicialSurface* surface_;
    MaterialParameters params_;
};

class QuadraticEnergy : public DeformationEnergy {
public:
    QuadraticEnergy(const SimplicialSurface& surface, QuadraticWeights weights,
                    MaterialParameters params)
        : surface_(&surface), weights_(std::move(weights)), params_(params) {}
    const SimplicialSurface& surface() const override { return *surface_; }
    const QuadraticWeights& weights() const { return weights_; }
    double value(const NricVector& z, const NricVector& zt) const override;
    EnergyDerivatives derivatives(const NricVector& z, const NricVector& zt,
                                  bool withFirstArgument) const override;

private:
    const SimplicialSurface* surface_;
    QuadraticWeights weights_;
    MaterialParameters params_;
};

enum class EnergyKind { Nonlinear, Quadratic };

// g_z = 1/2 Hess_2 W[z, z].
Eigen::SparseMatrix<double> riemannianMetric(const SimplicialSurface& surface,
                                             const NricVector& z,
                                             const MaterialParameters& params,
                                             EnergyKind kind);

}  // namespace nric
