#include "tangent.hpp"

#include <Eigen/SVD>

namespace nric {

namespace {

void requireOnManifold(const ConstraintSystem& system, const NricVector& z, double tol) {
    double r = system.residual(z).cwiseAbs().maxCoeff();
    if (!(r <= tol))
        throw NotOnManifold("integrability residual " + std::to_string(r) +
                            " exceeds tolerance " + std::to_string(tol));
}

}  // namespace

TangentBasis tangentBasis(const ConstraintSystem& system, const NricVector& z,
                          double integrabilityTol) {
    requireOnManifold(system, z, integrabilityTol);
    Eigen::MatrixXd jac = Eigen::MatrixXd(system.jacobian(z));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double sigmaMax = sv.size() > 0 ? sv[0] : 0.0;
    double tau = std::max(jac.rows(), jac.cols()) *
                 std::numeric_limits<double>::epsilon() * sigmaMax;
    int rank = 0;
    while (rank < sv.size() && sv[rank] > tau) ++rank;

    TangentBasis out;
    out.rank = rank;
    out.sigmaMax = sigmaMax;
    out.basis = svd.matrixV().rightCols(jac.cols() - rank);
    return out;
}

RigidityResult rigidityTest(const ConstraintSystem& system, const NricVector& z,
                            const std::vector<bool>& angleSelector, double integrabilityTol,
                            double zeroThresholdFactor) {
    const SimplicialSurface& s = system.surface();
    const int ne = s.edgeCount();
    const int na = s.interiorEdgeCount();
    TangentBasis tangent = tangentBasis(system, z, integrabilityTol);

    std::vector<int> angleCols;
    for (int j = 0; j < na; ++j)
        if (angleSelector.empty() || angleSelector[j]) angleCols.push_back(j);

    RigidityResult out;
    out.tangentDim = static_cast<int>(tangent.basis.cols());
    if (angleCols.empty()) {
        out.candidateSubspaceEmpty = true;
        return out;
    }

    const int k = out.tangentDim;
    Eigen::MatrixXd combined(s.nricDim(), k + static_cast<int>(angleCols.size()));
    combined.leftCols(k) = tangent.basis;
    combined.rightCols(angleCols.size()).setZero();
    for (size_t i = 0; i < angleCols.size(); ++i)
        combined(ne + angleCols[i], k + static_cast<int>(i)) = 1.0;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(combined, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    out.lambda0 = sv[sv.size() - 1];
    out.sigmaMax = sv[0];
    if (out.lambda0 < zeroThresholdFactor * out.sigmaMax) {
        // Right singular vector (u, v) of the smallest singular value gives
        // B_T u ~ -B_theta v: a tangent vector with vanishing length part.
        Eigen::VectorXd uv = svd.matrixV().col(sv.size() - 1);
        Eigen::VectorXd w = tangent.basis * uv.head(k);
        double n = w.norm();
        if (n > 0) w /= n;
        out.variation = w;
    }
    return out;
}

}  // namespace nric
