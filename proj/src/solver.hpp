#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <vector>

#include "mesh.hpp"

namespace nric {

struct InfeasibleStart : NricError {
    using NricError::NricError;
};

struct SolverConfig {
    double mu0 = 10.0;        // initial penalty
    double lambda0 = 0.0;     // initial multipliers (constant vector)
    double muPlus = 100.0;    // penalty increase factor
    double etaPlus = 0.9;     // tolerance tightening exponent
    double epsQ = 1e-8;       // constraint tolerance, max norm
    double epsL = 1e-4;       // optimality tolerance, 2-norm of grad L
    int kMax = 100;           // outer iterations
    int jMax = 500;           // inner Newton iterations per outer step
    double tauPlus = 10.0;    // shift increase factor
    double betaShift = 1e-3;  // minimal diagonal shift
    double armijoSigma = 0.1;
    double backtrack = 0.5;
    double minStep = 1e-14;   // line-search stall threshold
    bool bfgsWarmStart = false;
    int bfgsIterations = 25;
};

// Parses "key = value" lines ('#' comments); unknown keys raise ParseError.
SolverConfig parseSolverConfig(const std::string& path);

// Equality-constrained problem min E(x) s.t. C(x) = 0 over a flat variable
// vector. Energies may return the infinity sentinel at infeasible points and
// constraint residual blocks may be sentinel-valued; derivative calls are only
// made at feasible points.
class ConstrainedProblem {
public:
    virtual ~ConstrainedProblem() = default;
    virtual int dim() const = 0;
    virtual int constraintDim() const = 0;
    virtual bool feasible(const Eigen::VectorXd& x) const = 0;
    virtual double energyValue(const Eigen::VectorXd& x) const = 0;
    virtual void energyDerivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                                   Eigen::SparseMatrix<double>& hess) const = 0;
    virtual Eigen::VectorXd constraintResidual(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::SparseMatrix<double> constraintJacobian(const Eigen::VectorXd& x) const = 0;
    // sum_i w_i D^2 C_i(x), symmetric.
    virtual Eigen::SparseMatrix<double> constraintHessianContraction(
        const Eigen::VectorXd& x, const Eigen::VectorXd& w) const = 0;
};

// Augmented Lagrangian L = E - C.lambda + mu/2 |C|^2 with derivatives.
double augmentedLagrangian(const ConstrainedProblem& problem, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda, double mu);
void augmentedLagrangianDerivatives(const ConstrainedProblem& problem,
                                    const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                                    double mu, Eigen::VectorXd& grad,
                                    Eigen::SparseMatrix<double>& hess);

struct SolveReport {
    bool converged = false;
    int outerIterations = 0;
    int innerIterations = 0;
    int penaltyIncreases = 0;
    int multiplierUpdates = 0;
    bool lineSearchStalled = false;
    double finalConstraintInf = 0.0;
    double finalGradNorm = 0.0;
    double finalEnergy = 0.0;
    double evalSeconds = 0.0;
    double factorSeconds = 0.0;
    double totalSeconds = 0.0;
    std::string message;

    std::string text() const;  // key = value block
};

struct SolveResult {
    Eigen::VectorXd x;
    Eigen::VectorXd multipliers;
    SolveReport report;
};

// Augmented Lagrange outer loop with a shifted-Cholesky Newton inner loop
// and triangle-inequality-aware backtracking. Unconstrained problems
// (constraintDim() == 0) reduce to a single Newton solve at tolerance epsL.
// Throws InfeasibleStart; non-convergence is reported, not thrown.
SolveResult solveConstrained(const ConstrainedProblem& problem, const Eigen::VectorXd& x0,
                             const SolverConfig& config);

// Coordinate constraints by variable elimination: fixed entries of the
// underlying variable vector are removed from the free vector and substituted
// as constants.
struct FixedCoordinates {
    std::vector<int> indices;  // indices into the full variable vector
    Eigen::VectorXd values;

    bool empty() const { return indices.empty(); }
};

class EliminatedProblem : public ConstrainedProblem {
public:
    EliminatedProblem(const ConstrainedProblem& inner, FixedCoordinates fixed);

    int dim() const override { return static_cast<int>(freeIndices_.size()); }
    int constraintDim() const override { return inner_->constraintDim(); }
    bool feasible(const Eigen::VectorXd& x) const override;
    double energyValue(const Eigen::VectorXd& x) const override;
    void energyDerivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                           Eigen::SparseMatrix<double>& hess) const override;
    Eigen::VectorXd constraintResidual(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> constraintJacobian(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> constraintHessianContraction(
        const Eigen::VectorXd& x, const Eigen::VectorXd& w) const override;

    Eigen::VectorXd embed(const Eigen::VectorXd& xFree) const;
    Eigen::VectorXd restrict(const Eigen::VectorXd& xFull) const;

private:
    Eigen::SparseMatrix<double> reduceSym(const Eigen::SparseMatrix<double>& h) const;

    const ConstrainedProblem* inner_;
    FixedCoordinates fixed_;
    std::vector<int> freeIndices_;       // free slot -> full index
    std::vector<int> fullToFree_;        // full index -> free slot or -1
};

// Constraint file: lines "L <edge> <value>", "A <edge> <value>", "L*", "A*";
// '#' comments. "A" rows address interior edges by their global edge index;
// starred forms freeze whole blocks at the values of z0.
FixedCoordinates parseConstraintFile(const std::string& path,
                                     const SimplicialSurface& surface,
                                     const NricVector& z0);

}  // namespace nric
