#include "constraints.hpp"

#include <cmath>

#include "geometry.hpp"

namespace nric {

namespace {
// Sentinel used for rotation residuals of inadmissible fans; large enough to
// push affected faces to the end of any traversal, small enough for graph
// arithmetic to stay finite.
constexpr double kResidualSentinel = 1e20;
}  // namespace

ConstraintSystem::ConstraintSystem(const SimplicialSurface& surface) : surface_(&surface) {
    const int ne = surface.edgeCount();
    for (int v : surface.interiorVertices()) {
        const VertexFan& fan = surface.fan(v);
        FanData data;
        data.vertex = v;
        const int n = static_cast<int>(fan.faces.size());
        for (int i = 0; i < n; ++i) {
            FanEntry entry;
            entry.lenA = fan.edges[i];
            entry.lenB = fan.edges[(i + 1) % n];
            entry.lenC = fan.oppositeEdges[i];
            entry.thetaCol = ne + surface.interiorEdgeIndex(fan.edges[i]);
            data.entries.push_back(entry);
        }
        fans_.push_back(std::move(data));
    }
}

bool ConstraintSystem::fanFeasible(const NricVector& z, const FanData& fan) const {
    for (const FanEntry& e : fan.entries) {
        if (!admissibleTriple(z.lengths[e.lenA], z.lengths[e.lenB], z.lengths[e.lenC]))
            return false;
    }
    return true;
}

bool ConstraintSystem::feasible(const NricVector& z) const {
    if ((z.lengths.array() <= 0).any()) return false;
    if ((z.angles.array().abs() >= M_PI).any()) return false;
    return triangleInequalities(*surface_, z).allStrictlyPositive;
}

std::vector<Quatd> ConstraintSystem::fanQuats(const NricVector& z, const FanData& fan) const {
    const int ne = surface_->edgeCount();
    std::vector<Quatd> qs;
    qs.reserve(fan.entries.size());
    for (const FanEntry& e : fan.entries) {
        double theta = z.angles[e.thetaCol - ne];
        qs.push_back(transitionQuat(theta, z.lengths[e.lenA], z.lengths[e.lenB],
                                    z.lengths[e.lenC]));
    }
    return qs;
}

Quatd ConstraintSystem::fanProduct(const NricVector& z, int v) const {
    for (const FanData& fan : fans_) {
        if (fan.vertex != v) continue;
        if (!fanFeasible(z, fan))
            throw TriangleInequalityViolated("fanProduct: inadmissible fan");
        Quatd p = Quatd::identity();
        for (const Quatd& q : fanQuats(z, fan)) p = p * q;
        return p;
    }
    throw MeshTopologyError("fanProduct: not an interior vertex");
}

Eigen::VectorXd ConstraintSystem::residual(const NricVector& z) const {
    Eigen::VectorXd r(constraintDim());
    for (size_t b = 0; b < fans_.size(); ++b) {
        const FanData& fan = fans_[b];
        if (!fanFeasible(z, fan)) {
            r.segment<3>(3 * b).setConstant(kInfSentinel);
            continue;
        }
        Quatd p = Quatd::identity();
        for (const Quatd& q : fanQuats(z, fan)) p = p * q;
        r.segment<3>(3 * b) = vec(p);
    }
    return r;
}

Eigen::VectorXd ConstraintSystem::rotationResidual(const NricVector& z) const {
    Eigen::VectorXd r(fans_.size());
    for (size_t b = 0; b < fans_.size(); ++b) {
        const FanData& fan = fans_[b];
        if (!fanFeasible(z, fan)) {
            r[b] = kResidualSentinel;
            continue;
        }
        Quatd p = Quatd::identity();
        for (const Quatd& q : fanQuats(z, fan)) p = p * q;
        // tr R(p) = 4 w^2 - 1 for unit p, so |tr - 3| = 4 |vec(p)|^2.
        r[b] = 4.0 * vec(p).squaredNorm() / normSq(p);
    }
    return r;
}

Eigen::SparseMatrix<double> ConstraintSystem::jacobian(const NricVector& z) const {
    const int ne = surface_->edgeCount();
    std::vector<Eigen::Triplet<double>> trip;
    for (size_t b = 0; b < fans_.size(); ++b) {
        const FanData& fan = fans_[b];
        if (!fanFeasible(z, fan))
            throw TriangleInequalityViolated("constraint jacobian: inadmissible fan");
        const int n = static_cast<int>(fan.entries.size());

        std::vector<QuatJet> jets;
        jets.reserve(n);
        for (const FanEntry& e : fan.entries)
            jets.push_back(transitionQuatJet(z.angles[e.thetaCol - ne], z.lengths[e.lenA],
                                             z.lengths[e.lenB], z.lengths[e.lenC]));

        std::vector<Quatd> qs(n);
        for (int i = 0; i < n; ++i)
            qs[i] = Quatd(jets[i].w.v, jets[i].x.v, jets[i].y.v, jets[i].z.v);

        // Prefix products q_0..q_{i-1} and suffix products q_{i+1}..q_{n-1}.
        std::vector<Quatd> pre(n + 1), suf(n + 1);
        pre[0] = Quatd::identity();
        for (int i = 0; i < n; ++i) pre[i + 1] = pre[i] * qs[i];
        suf[n] = Quatd::identity();
        for (int i = n - 1; i >= 0; --i) suf[i] = qs[i] * suf[i + 1];

        for (int i = 0; i < n; ++i) {
            const FanEntry& e = fan.entries[i];
            const int cols[4] = {e.thetaCol, e.lenA, e.lenB, e.lenC};
            for (int k = 0; k < 4; ++k) {
                Quatd dq(jets[i].w.g[k], jets[i].x.g[k], jets[i].y.g[k], jets[i].z.g[k]);
                Eigen::Vector3d dvec = vec(pre[i] * dq * suf[i + 1]);
                for (int m = 0; m < 3; ++m)
                    trip.emplace_back(3 * b + m, cols[k], dvec[m]);
            }
        }
    }
    Eigen::SparseMatrix<double> jac(constraintDim(), surface_->nricDim());
    jac.setFromTriplets(trip.begin(), trip.end());
    return jac;
}

Eigen::SparseMatrix<double> ConstraintSystem::hessianContraction(
    const NricVector& z, const Eigen::VectorXd& weights) const {
    const int ne = surface_->edgeCount();
    const int dim = surface_->nricDim();
    std::vector<Eigen::Triplet<double>> trip;
    for (size_t b = 0; b < fans_.size(); ++b) {
        const FanData& fan = fans_[b];
        if (!fanFeasible(z, fan))
            throw TriangleInequalityViolated("constraint hessian: inadmissible fan");
        const Eigen::Vector3d w = weights.segment<3>(3 * b);
        const int n = static_cast<int>(fan.entries.size());

        std::vector<QuatJet> jets;
        jets.reserve(n);
        for (const FanEntry& e : fan.entries)
            jets.push_back(transitionQuatJet(z.angles[e.thetaCol - ne], z.lengths[e.lenA],
                                             z.lengths[e.lenB], z.lengths[e.lenC]));
        std::vector<Quatd> qs(n);
        for (int i = 0; i < n; ++i)
            qs[i] = Quatd(jets[i].w.v, jets[i].x.v, jets[i].y.v, jets[i].z.v);

        std::vector<Quatd> pre(n + 1), suf(n + 1);
        pre[0] = Quatd::identity();
        for (int i = 0; i < n; ++i) pre[i + 1] = pre[i] * qs[i];
        suf[n] = Quatd::identity();
        for (int i = n - 1; i >= 0; --i) suf[i] = qs[i] * suf[i + 1];

        auto deriv = [&](int i, int k) {
            return Quatd(jets[i].w.g[k], jets[i].x.g[k], jets[i].y.g[k], jets[i].z.g[k]);
        };
        auto colsOf = [&](int i) {
            const FanEntry& e = fan.entries[i];
            return std::array<int, 4>{e.thetaCol, e.lenA, e.lenB, e.lenC};
        };

        // Diagonal blocks: second derivatives within a single transition.
        for (int i = 0; i < n; ++i) {
            auto cols = colsOf(i);
            for (int k = 0; k < 4; ++k) {
                for (int l = 0; l < 4; ++l) {
                    Quatd d2(jets[i].w.h(k, l), jets[i].x.h(k, l), jets[i].y.h(k, l),
                             jets[i].z.h(k, l));
                    double val = w.dot(vec(pre[i] * d2 * suf[i + 1]));
                    if (val != 0.0) trip.emplace_back(cols[k], cols[l], val);
                }
            }
        }

        // Mixed first-derivative terms between distinct transitions.
        for (int i = 0; i < n; ++i) {
            auto colsI = colsOf(i);
            std::array<Quatd, 4> left;
            for (int k = 0; k < 4; ++k) left[k] = pre[i] * deriv(i, k);
            Quatd mid = Quatd::identity();
            for (int j = i + 1; j < n; ++j) {
                auto colsJ = colsOf(j);
                for (int k = 0; k < 4; ++k) {
                    Quatd lm = left[k] * mid;
                    for (int l = 0; l < 4; ++l) {
                        Quatd right = deriv(j, l) * suf[j + 1];
                        double val = w.dot(vec(lm * right));
                        if (val != 0.0) {
                            trip.emplace_back(colsI[k], colsJ[l], val);
                            trip.emplace_back(colsJ[l], colsI[k], val);
                        }
                    }
                }
                mid = mid * qs[j];
            }
        }
    }
    Eigen::SparseMatrix<double> hess(dim, dim);
    hess.setFromTriplets(trip.begin(), trip.end());
    return hess;
}

}  // namespace nric
