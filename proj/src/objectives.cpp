#include "objectives.hpp"

#include <cmath>

#include "geometry.hpp"

namespace nric {

ShapeProblem::ShapeProblem(const ConstraintSystem& system, const DeformationEnergy& energy,
                           std::vector<NricVector> references, std::vector<double> weights)
    : system_(&system),
      energy_(&energy),
      references_(std::move(references)),
      weights_(std::move(weights)) {
    if (references_.empty() || references_.size() != weights_.size())
        throw NricError("ShapeProblem: references and weights must match and be nonempty");
}

bool ShapeProblem::feasible(const Eigen::VectorXd& x) const {
    return system_->feasible(NricVector::fromStacked(system_->surface(), x));
}

double ShapeProblem::energyValue(const Eigen::VectorXd& x) const {
    NricVector z = NricVector::fromStacked(system_->surface(), x);
    double total = 0.0;
    for (size_t i = 0; i < references_.size(); ++i) {
        double v = energy_->value(references_[i], z);
        if (v >= kInfSentinel) return kInfSentinel;
        total += weights_[i] * v;
    }
    return total;
}

void ShapeProblem::energyDerivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                                     Eigen::SparseMatrix<double>& hess) const {
    NricVector z = NricVector::fromStacked(system_->surface(), x);
    const int n = dim();
    grad = Eigen::VectorXd::Zero(n);
    hess.resize(n, n);
    hess.setZero();
    for (size_t i = 0; i < references_.size(); ++i) {
        EnergyDerivatives d = energy_->derivatives(references_[i], z, false);
        grad += weights_[i] * d.grad2;
        hess += weights_[i] * d.hess22;
    }
}

Eigen::VectorXd ShapeProblem::constraintResidual(const Eigen::VectorXd& x) const {
    return system_->residual(NricVector::fromStacked(system_->surface(), x));
}

Eigen::SparseMatrix<double> ShapeProblem::constraintJacobian(const Eigen::VectorXd& x) const {
    return system_->jacobian(NricVector::fromStacked(system_->surface(), x));
}

Eigen::SparseMatrix<double> ShapeProblem::constraintHessianContraction(
    const Eigen::VectorXd& x, const Eigen::VectorXd& w) const {
    return system_->hessianContraction(NricVector::fromStacked(system_->surface(), x), w);
}

GeodesicPath initializeGeodesic(const SimplicialSurface& surface, const NricVector& zA,
                                const NricVector& zB, int K) {
    if (K < 1) throw NricError("initializeGeodesic: K must be at least 1");
    GeodesicPath path;
    path.K = K;
    path.shapes.reserve(K + 1);
    for (int k = 0; k <= K; ++k) {
        double t = static_cast<double>(k) / K;
        NricVector z((1.0 - t) * zA.lengths + t * zB.lengths,
                     (1.0 - t) * zA.angles + t * zB.angles);
        if (!triangleInequalities(surface, z).allStrictlyPositive)
            z.lengths = (zA.lengths.array().log() * (1.0 - t) + zB.lengths.array().log() * t)
                            .exp()
                            .matrix();
        path.shapes.push_back(std::move(z));
    }
    return path;
}

GeodesicProblem::GeodesicProblem(const ConstraintSystem& system,
                                 const DeformationEnergy& energy, NricVector z0,
                                 NricVector zK, int K)
    : system_(&system),
      energy_(&energy),
      z0_(std::move(z0)),
      zK_(std::move(zK)),
      K_(K),
      shapeDim_(system.surface().nricDim()) {
    if (K < 2) throw NricError("GeodesicProblem: K must be at least 2");
    if (!system.feasible(z0_) || !system.feasible(zK_))
        throw EndpointInfeasible("GeodesicProblem: an endpoint violates feasibility");
}

Eigen::VectorXd GeodesicProblem::stackFree(const GeodesicPath& path) const {
    if (path.K != K_ || static_cast<int>(path.shapes.size()) != K_ + 1)
        throw NricError("GeodesicProblem::stackFree: path shape mismatch");
    Eigen::VectorXd x(dim());
    for (int k = 1; k < K_; ++k) x.segment((k - 1) * shapeDim_, shapeDim_) =
        path.shapes[k].stacked();
    return x;
}

GeodesicPath GeodesicProblem::unstack(const Eigen::VectorXd& x) const {
    GeodesicPath path;
    path.K = K_;
    path.shapes.resize(K_ + 1);
    path.shapes[0] = z0_;
    path.shapes[K_] = zK_;
    for (int k = 1; k < K_; ++k)
        path.shapes[k] = NricVector::fromStacked(
            system_->surface(), x.segment((k - 1) * shapeDim_, shapeDim_));
    return path;
}

std::vector<NricVector> GeodesicProblem::assemble(const Eigen::VectorXd& x) const {
    std::vector<NricVector> shapes(K_ + 1);
    shapes[0] = z0_;
    shapes[K_] = zK_;
    for (int k = 1; k < K_; ++k)
        shapes[k] = NricVector::fromStacked(system_->surface(),
                                            x.segment((k - 1) * shapeDim_, shapeDim_));
    return shapes;
}

bool GeodesicProblem::feasible(const Eigen::VectorXd& x) const {
    for (int k = 1; k < K_; ++k) {
        if (!system_->feasible(NricVector::fromStacked(
                system_->surface(), x.segment((k - 1) * shapeDim_, shapeDim_))))
            return false;
    }
    return true;
}

Eigen::VectorXd GeodesicProblem::segmentEnergies(const Eigen::VectorXd& x) const {
    std::vector<NricVector> shapes = assemble(x);
    Eigen::VectorXd e(K_);
    for (int k = 1; k <= K_; ++k) e[k - 1] = energy_->value(shapes[k - 1], shapes[k]);
    return e;
}

double GeodesicProblem::energyValue(const Eigen::VectorXd& x) const {
    Eigen::VectorXd e = segmentEnergies(x);
    if ((e.array() >= kInfSentinel).any()) return kInfSentinel;
    return K_ * e.sum();
}

void GeodesicProblem::energyDerivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                                        Eigen::SparseMatrix<double>& hess) const {
    std::vector<NricVector> shapes = assemble(x);
    const int n = dim();
    grad = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;

    auto scatter = [&](const Eigen::SparseMatrix<double>& block, int rowShape, int colShape,
                       bool alsoTransposed) {
        int r0 = (rowShape - 1) * shapeDim_, c0 = (colShape - 1) * shapeDim_;
        for (int c = 0; c < block.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(block, c); it; ++it) {
                double v = K_ * it.value();
                trip.emplace_back(r0 + static_cast<int>(it.row()), c0 + c, v);
                if (alsoTransposed)
                    trip.emplace_back(c0 + c, r0 + static_cast<int>(it.row()), v);
            }
    };

    for (int k = 1; k <= K_; ++k) {
        bool firstFree = k - 1 >= 1;
        bool secondFree = k <= K_ - 1;
        EnergyDerivatives d = energy_->derivatives(shapes[k - 1], shapes[k], firstFree);
        if (secondFree) {
            grad.segment((k - 1) * shapeDim_, shapeDim_) += K_ * d.grad2;
            scatter(d.hess22, k, k, false);
        }
        if (firstFree) {
            grad.segment((k - 2) * shapeDim_, shapeDim_) += K_ * d.grad1;
            scatter(d.hess11, k - 1, k - 1, false);
            if (secondFree) scatter(d.hess12, k - 1, k, true);
        }
    }
    hess.resize(n, n);
    hess.setFromTriplets(trip.begin(), trip.end());
}

Eigen::VectorXd GeodesicProblem::constraintResidual(const Eigen::VectorXd& x) const {
    const int m = system_->constraintDim();
    Eigen::VectorXd r(constraintDim());
    for (int k = 1; k < K_; ++k)
        r.segment((k - 1) * m, m) = system_->residual(NricVector::fromStacked(
            system_->surface(), x.segment((k - 1) * shapeDim_, shapeDim_)));
    return r;
}

Eigen::SparseMatrix<double> GeodesicProblem::constraintJacobian(
    const Eigen::VectorXd& x) const {
    const int m = system_->constraintDim();
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 1; k < K_; ++k) {
        Eigen::SparseMatrix<double> jac = system_->jacobian(NricVector::fromStacked(
            system_->surface(), x.segment((k - 1) * shapeDim_, shapeDim_)));
        for (int c = 0; c < jac.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(jac, c); it; ++it)
                trip.emplace_back((k - 1) * m + static_cast<int>(it.row()),
                                  (k - 1) * shapeDim_ + c, it.value());
    }
    Eigen::SparseMatrix<double> out(constraintDim(), dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Eigen::SparseMatrix<double> GeodesicProblem::constraintHessianContraction(
    const Eigen::VectorXd& x, const Eigen::VectorXd& w) const {
    const int m = system_->constraintDim();
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 1; k < K_; ++k) {
        Eigen::SparseMatrix<double> h = system_->hessianContraction(
            NricVector::fromStacked(system_->surface(),
                                    x.segment((k - 1) * shapeDim_, shapeDim_)),
            w.segment((k - 1) * m, m));
        for (int c = 0; c < h.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(h, c); it; ++it)
                trip.emplace_back((k - 1) * shapeDim_ + static_cast<int>(it.row()),
                                  (k - 1) * shapeDim_ + c, it.value());
    }
    Eigen::SparseMatrix<double> out(dim(), dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SolveResult projectToManifold(const ConstraintSystem& system, const NricVector& z0,
                              const SolverConfig& config, const MaterialParameters& params) {
    QuadraticWeights w = quadraticWeights(system.surface(), z0);
    QuadraticEnergy energy(system.surface(), w, params);
    ShapeProblem problem(system, energy, {z0}, {1.0});
    return solveConstrained(problem, z0.stacked(), config);
}

NricVector isometricExtrapolate(const ConstraintSystem& system, const NricVector& z,
                                const Eigen::VectorXd& variation, double h,
                                const SolverConfig& config,
                                const MaterialParameters& params) {
    const SimplicialSurface& s = system.surface();
    if (variation.size() != s.nricDim())
        throw NricError("isometricExtrapolate: variation has wrong dimension");
    if (h == 0.0) {
        double meanAngle = z.angles.size() > 0 ? z.angles.cwiseAbs().mean() : 0.0;
        h = 0.05 * (meanAngle > 0 ? meanAngle : 1.0);
    }
    NricVector stepped = z;
    stepped.angles += h * variation.tail(s.interiorEdgeCount());
    SolveResult r = projectToManifold(system, stepped, config, params);
    return NricVector::fromStacked(s, r.x);
}

}  // namespace nric
