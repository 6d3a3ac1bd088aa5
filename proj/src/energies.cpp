#include "energies.hpp"

#include <cmath>

#include "autodiff.hpp"
#include "geometry.hpp"

namespace nric {

namespace {

template <typename T>
T heronAreaSq(const T& a, const T& b, const T& c) {
    return (a + b + c) * (b + c - a) * (a - b + c) * (a + b - c) / 16.0;
}

// Density a_f * W_mem(G^hat) in the closed trace/determinant form; templated
// so the same expression produces values and second-order jets.
template <typename T>
T membraneDensity(const T& a, const T& b, const T& c, const T& ta, const T& tb, const T& tc,
                  const MaterialParameters& p) {
    T a2 = a * a, b2 = b * b, c2 = c * c;
    T areaSq = heronAreaSq(a, b, c);
    T areaSqT = heronAreaSq(ta, tb, tc);
    T tr = (ta * ta * (b2 + c2 - a2) + tb * tb * (a2 + c2 - b2) + tc * tc * (a2 + b2 - c2)) /
           (8.0 * areaSq);
    T det = areaSqT / areaSq;
    // The log coefficient mu/2 + lambda/4 is the unique choice making the
    // identity a critical point (and hence the global minimum) of the density.
    T w = 0.5 * p.mu * tr + 0.25 * p.lambda * det -
          (0.5 * p.mu + 0.25 * p.lambda) * log(det) - (p.mu + 0.25 * p.lambda);
    return sqrt(areaSq) * w;
}

void requireReferenceAdmissible(const SimplicialSurface& surface, const NricVector& z,
                                const char* who) {
    if (!triangleInequalities(surface, z).allStrictlyPositive)
        throw ReferenceDegenerate(std::string(who) + ": undeformed argument is inadmissible");
}

double faceAreaOf(const SimplicialSurface& surface, const Eigen::VectorXd& lengths, int f) {
    Eigen::Vector3d l = faceLengths(surface, lengths, f);
    return faceArea(l[0], l[1], l[2]);
}

}  // namespace

QuadraticWeights quadraticWeights(const SimplicialSurface& surface, const NricVector& zbar,
                                  WeightRecipe recipe) {
    requireReferenceAdmissible(surface, zbar, "quadraticWeights");
    const int ne = surface.edgeCount();
    Eigen::VectorXd faceAreas(surface.faceCount());
    for (int f = 0; f < surface.faceCount(); ++f)
        faceAreas[f] = faceAreaOf(surface, zbar.lengths, f);

    QuadraticWeights w;
    w.reference = zbar;
    w.recipe = recipe;
    w.alpha.resize(ne);
    w.beta.resize(surface.interiorEdgeCount());
    for (int e = 0; e < ne; ++e) {
        double d = faceAreas[surface.edgeFace(e, 0)];
        if (!surface.isBoundaryEdge(e)) d += faceAreas[surface.edgeFace(e, 1)];
        d /= 3.0;
        double l = zbar.lengths[e];
        w.alpha[e] = (recipe == WeightRecipe::AreaWeightedLength) ? d / (l * l) : 1.0 / (l * l);
        int j = surface.interiorEdgeIndex(e);
        if (j >= 0) w.beta[j] = l * l / d;
    }
    return w;
}

double localMembrane(double a, double b, double c, double ta, double tb, double tc,
                     const MaterialParameters& params) {
    if (!admissibleTriple(a, b, c))
        throw ReferenceDegenerate("localMembrane: undeformed triple is inadmissible");
    if (!admissibleTriple(ta, tb, tc)) return kInfSentinel;
    return membraneDensity(a, b, c, ta, tb, tc, params);
}

double membraneEnergy(const SimplicialSurface& surface, const NricVector& z,
                      const NricVector& zt, const MaterialParameters& params) {
    requireReferenceAdmissible(surface, z, "membraneEnergy");
    double total = 0.0;
    for (int f = 0; f < surface.faceCount(); ++f) {
        Eigen::Vector3d l = faceLengths(surface, z.lengths, f);
        Eigen::Vector3d lt = faceLengths(surface, zt.lengths, f);
        if (!admissibleTriple(lt[0], lt[1], lt[2])) return kInfSentinel;
        total += membraneDensity(l[0], l[1], l[2], lt[0], lt[1], lt[2], params);
    }
    return total;
}

double bendingEnergy(const SimplicialSurface& surface, const NricVector& z,
                     const NricVector& zt, const MaterialParameters& params) {
    requireReferenceAdmissible(surface, z, "bendingEnergy");
    Eigen::VectorXd faceAreas(surface.faceCount());
    for (int f = 0; f < surface.faceCount(); ++f)
        faceAreas[f] = faceAreaOf(surface, z.lengths, f);
    double total = 0.0;
    for (int e : surface.interiorEdges()) {
        int j = surface.interiorEdgeIndex(e);
        double d = (faceAreas[surface.edgeFace(e, 0)] + faceAreas[surface.edgeFace(e, 1)]) / 3.0;
        double dtheta = z.angles[j] - zt.angles[j];
        total += dtheta * dtheta * z.lengths[e] * z.lengths[e] / d;
    }
    return total;
}

double nonlinearEnergy(const SimplicialSurface& surface, const NricVector& z,
                       const NricVector& zt, const MaterialParameters& params) {
    double mem = membraneEnergy(surface, z, zt, params);
    if (mem >= kInfSentinel) return kInfSentinel;
    return mem + params.delta * params.delta * bendingEnergy(surface, z, zt, params);
}

double quadraticEnergy(const SimplicialSurface& surface, const NricVector& z,
                       const NricVector& zt, const QuadraticWeights& weights,
                       const MaterialParameters& params) {
    (void)surface;
    Eigen::VectorXd dl = zt.lengths - z.lengths;
    Eigen::VectorXd da = zt.angles - z.angles;
    return dl.cwiseProduct(dl).dot(weights.alpha) +
           params.delta * params.delta * da.cwiseProduct(da).dot(weights.beta);
}

double NonlinearEnergy::value(const NricVector& z, const NricVector& zt) const {
    return nonlinearEnergy(*surface_, z, zt, params_);
}

EnergyDerivatives NonlinearEnergy::derivatives(const NricVector& z, const NricVector& zt,
                                               bool withFirstArgument) const {
    const SimplicialSurface& s = *surface_;
    requireReferenceAdmissible(s, z, "NonlinearEnergy::derivatives");
    const int dim = s.nricDim();
    const int ne = s.edgeCount();
    const double d2 = params_.delta * params_.delta;

    EnergyDerivatives out;
    out.grad2 = Eigen::VectorXd::Zero(dim);
    if (withFirstArgument) out.grad1 = Eigen::VectorXd::Zero(dim);
    std::vector<Eigen::Triplet<double>> t22, t11, t12;

    // Membrane: one 6-variable jet per face (undeformed lengths first).
    for (int f = 0; f < s.faceCount(); ++f) {
        Eigen::Vector3d l = faceLengths(s, z.lengths, f);
        Eigen::Vector3d lt = faceLengths(s, zt.lengths, f);
        if (!admissibleTriple(lt[0], lt[1], lt[2]))
            throw InfeasiblePoint("NonlinearEnergy::derivatives: deformed face " +
                                  std::to_string(f) + " violates a triangle inequality");
        using J = D2<6>;
        J val = membraneDensity(J::variable(l[0], 0), J::variable(l[1], 1),
                                J::variable(l[2], 2), J::variable(lt[0], 3),
                                J::variable(lt[1], 4), J::variable(lt[2], 5), params_);
        out.value += val.v;
        int cols[3] = {s.faceEdge(f, 0), s.faceEdge(f, 1), s.faceEdge(f, 2)};
        for (int i = 0; i < 3; ++i) {
            out.grad2[cols[i]] += val.g[3 + i];
            for (int k = 0; k < 3; ++k) t22.emplace_back(cols[i], cols[k], val.h(3 + i, 3 + k));
        }
        if (withFirstArgument) {
            for (int i = 0; i < 3; ++i) {
                out.grad1[cols[i]] += val.g[i];
                for (int k = 0; k < 3; ++k) {
                    t11.emplace_back(cols[i], cols[k], val.h(i, k));
                    t12.emplace_back(cols[i], cols[k], val.h(i, 3 + k));
                }
            }
        }
    }

    // Bending: per interior edge, a 7-variable jet over the five undeformed
    // lengths of the edge's two faces, theta, and deformed theta.
    for (int e : s.interiorEdges()) {
        int j = s.interiorEdgeIndex(e);
        int f0 = s.edgeFace(e, 0), f1 = s.edgeFace(e, 1);
        using J = D2<7>;
        // Variable slots: 0 = l_e, 1..4 = the other four lengths, 5 = theta,
        // 6 = deformed theta.
        int cols[7];
        cols[0] = e;
        J lv[5];
        lv[0] = J::variable(z.lengths[e], 0);
        int nv = 1;
        std::array<J, 2> areas;
        for (int side = 0; side < 2; ++side) {
            int f = side == 0 ? f0 : f1;
            J fl[3];
            for (int k = 0; k < 3; ++k) {
                int ek = s.faceEdge(f, k);
                if (ek == e) {
                    fl[k] = lv[0];
                } else {
                    cols[nv] = ek;
                    fl[k] = J::variable(z.lengths[ek], nv);
                    lv[nv] = fl[k];
                    ++nv;
                }
            }
            areas[side] = sqrt(heronAreaSq(fl[0], fl[1], fl[2]));
        }
        cols[5] = ne + j;
        cols[6] = ne + j;
        J theta = J::variable(z.angles[j], 5);
        J thetaT = J::variable(zt.angles[j], 6);
        J d = (areas[0] + areas[1]) / 3.0;
        J dth = theta - thetaT;
        J val = d2 * (dth * dth * lv[0] * lv[0] / d);

        out.value += val.v;
        out.grad2[cols[6]] += val.g[6];
        t22.emplace_back(cols[6], cols[6], val.h(6, 6));
        if (withFirstArgument) {
            for (int i = 0; i < 6; ++i) {
                out.grad1[cols[i]] += val.g[i];
                for (int k = 0; k < 6; ++k) t11.emplace_back(cols[i], cols[k], val.h(i, k));
                t12.emplace_back(cols[i], cols[6], val.h(i, 6));
            }
        }
    }

    out.hess22.resize(dim, dim);
    out.hess22.setFromTriplets(t22.begin(), t22.end());
    if (withFirstArgument) {
        out.hess11.resize(dim, dim);
        out.hess11.setFromTriplets(t11.begin(), t11.end());
        out.hess12.resize(dim, dim);
        out.hess12.setFromTriplets(t12.begin(), t12.end());
    }
    return out;
}

double QuadraticEnergy::value(const NricVector& z, const NricVector& zt) const {
    return quadraticEnergy(*surface_, z, zt, weights_, params_);
}

EnergyDerivatives QuadraticEnergy::derivatives(const NricVector& z, const NricVector& zt,
                                               bool withFirstArgument) const {
    const int dim = surface_->nricDim();
    const int ne = surface_->edgeCount();
    const double d2 = params_.delta * params_.delta;
    Eigen::VectorXd w(dim);
    w << weights_.alpha, d2 * weights_.beta;

    Eigen::VectorXd diff = zt.stacked() - z.stacked();
    EnergyDerivatives out;
    out.value = diff.cwiseProduct(diff).dot(w);
    out.grad2 = 2.0 * w.cwiseProduct(diff);

    std::vector<Eigen::Triplet<double>> diag;
    diag.reserve(dim);
    for (int i = 0; i < dim; ++i) diag.emplace_back(i, i, 2.0 * w[i]);
    out.hess22.resize(dim, dim);
    out.hess22.setFromTriplets(diag.begin(), diag.end());
    if (withFirstArgument) {
        out.grad1 = -out.grad2;
        out.hess11 = out.hess22;
        out.hess12 = -out.hess22;
    }
    (void)ne;
    return out;
}

Eigen::SparseMatrix<double> riemannianMetric(const SimplicialSurface& surface,
                                             const NricVector& z,
                                             const MaterialParameters& params,
                                             EnergyKind kind) {
    if (kind == EnergyKind::Quadratic) {
        QuadraticWeights w = quadraticWeights(surface, z);
        QuadraticEnergy energy(surface, w, params);
        Eigen::SparseMatrix<double> h = energy.derivatives(z, z, false).hess22;
        return 0.5 * h;
    }
    NonlinearEnergy energy(surface, params);
    Eigen::SparseMatrix<double> h = energy.derivatives(z, z, false).hess22;
    return 0.5 * h;
}

}  // namespace nric
