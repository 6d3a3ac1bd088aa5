#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "energies.hpp"
#include "geometry.hpp"
#include "meshgen.hpp"

using namespace nric;
using namespace nric::testing;

namespace {

constexpr double kMu = 1.0, kLambda = 1.0;

// Independent oracle for the distortion tensor: lay both triangles out in the
// plane from their edge lengths and form G = (E^T E)^{-1} (Et^T Et).
Eigen::Matrix2d distortionFromLayout(double a, double b, double c, double ta, double tb,
                                     double tc) {
    auto layout = [](double a, double b, double c) {
        Eigen::Matrix2d E;
        double x = (a * a + b * b - c * c) / (2 * a);  // corner 2 coordinates
        E << a, x, 0.0, std::sqrt(b * b - x * x);
        return E;
    };
    Eigen::Matrix2d E = layout(a, b, c), Et = layout(ta, tb, tc);
    return (E.transpose() * E).inverse() * (Et.transpose() * Et);
}

double densityOracle(const Eigen::Matrix2d& A, const MaterialParameters& p) {
    double tr = A.trace(), det = A.determinant();
    return 0.5 * p.mu * tr + 0.25 * p.lambda * det -
           (0.5 * p.mu + 0.25 * p.lambda) * std::log(det) - (p.mu + 0.25 * p.lambda);
}

double relError(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) { return Eigen::MatrixXd(m); }

double relErrorM(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("membrane density basics") {
    MaterialParameters p{kMu, kLambda, 1e-2};
    // identical triples -> 0
    CHECK(localMembrane(1, 1, 1, 1, 1, 1, p) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(localMembrane(0.7, 1.1, 0.9, 0.7, 1.1, 0.9, p) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // uniform scale s: tr = 2 s^2, det = s^4
    double s = 1.3;
    double area = faceArea(1, 1, 1);
    double w = 0.5 * p.mu * 2 * s * s + 0.25 * p.lambda * std::pow(s, 4) -
               (0.5 * p.mu + 0.25 * p.lambda) * std::log(std::pow(s, 4)) -
               (p.mu + 0.25 * p.lambda);
    CHECK(relError(localMembrane(1, 1, 1, s, s, s, p), area * w) < 1e-13);
    // degenerate deformed triple -> sentinel
    CHECK(localMembrane(1, 1, 1, 1, 1, 2, p) >= kInfSentinel);
    CHECK(localMembrane(1, 1, 1, 0.0, 1, 1, p) >= kInfSentinel);
    // inadmissible reference throws
    Eigen::VectorXd badLengths = Eigen::VectorXd::Ones(5);
    badLengths[0] = 10.0;  // violates the triangle inequality in the reference
    CHECK_THROWS_AS(membraneEnergy(grid(1, 1).surface(),
                                   NricVector(badLengths, Eigen::VectorXd::Zero(1)),
                                   NricVector(Eigen::VectorXd::Ones(5),
                                              Eigen::VectorXd::Zero(1)),
                                   p),
                    ReferenceDegenerate);
}

TEST_CASE("membrane density against planar-layout oracle") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(0.5, 2.0);
    MaterialParameters p{kMu, kLambda, 1e-2};
    int accepted = 0;
    while (accepted < 50) {
        double a = uni(rng), b = uni(rng), c = uni(rng);
        double ta = uni(rng), tb = uni(rng), tc = uni(rng);
        if (!admissibleTriple(a, b, c) || !admissibleTriple(ta, tb, tc)) continue;
        ++accepted;
        Eigen::Matrix2d G = distortionFromLayout(a, b, c, ta, tb, tc);
        double expected = faceArea(a, b, c) * densityOracle(G, p);
        CHECK(relError(localMembrane(a, b, c, ta, tb, tc, p), expected) < 1e-11);
    }
}

TEST_CASE("membrane diverges monotonically under face shrinkage") {
    MaterialParameters p{kMu, kLambda, 1e-2};
    double prev = localMembrane(1, 1, 1, 0.5, 0.5, 0.5, p);
    for (int k = 2; k < 20; ++k) {
        double t = std::pow(2.0, -k);
        double v = localMembrane(1, 1, 1, t, t, t, p);
        CHECK(v > prev);
        prev = v;
    }
    // the log det barrier diverges slowly but without bound
    CHECK(prev > 10.0);
}

TEST_CASE("bending energy single-edge example") {
    MaterialParameters p{kMu, kLambda, 1.0};
    Mesh m = grid(2, 1);  // small strip
    SimplicialSurface s = m.surface();
    NricVector z = forwardMap(s, m.positions);
    NricVector zt = z;
    int j = 1;  // bump one interior edge angle
    zt.angles[j] += 0.2;
    int e = s.interiorEdges()[j];
    double l = z.lengths[e];
    Eigen::Vector3d l0 = faceLengths(s, z.lengths, s.edgeFace(e, 0));
    Eigen::Vector3d l1 = faceLengths(s, z.lengths, s.edgeFace(e, 1));
    double d = (faceArea(l0[0], l0[1], l0[2]) + faceArea(l1[0], l1[1], l1[2])) / 3.0;
    CHECK(relError(bendingEnergy(s, z, zt, p), 0.04 * l * l / d) < 1e-13);
    // delta = 0 -> nonlinear equals membrane
    MaterialParameters p0{kMu, kLambda, 0.0};
    NricVector zBoth = zt;
    zBoth.lengths *= 1.05;
    CHECK(relError(nonlinearEnergy(s, z, zBoth, p0), membraneEnergy(s, z, zBoth, p0)) <
          1e-13);
    // delta enters squared
    MaterialParameters pd{kMu, kLambda, 0.1};
    CHECK(relError(nonlinearEnergy(s, z, zt, pd) - membraneEnergy(s, z, zt, pd),
                   0.01 * bendingEnergy(s, z, zt, pd)) < 1e-13);
}

TEST_CASE("quadratic weights match their recipes") {
    Mesh m = grid(3, 2, 0.8, [](double x, double y) { return 0.2 * std::sin(x + 2 * y); });
    SimplicialSurface s = m.surface();
    NricVector z = forwardMap(s, m.positions);
    for (WeightRecipe recipe :
         {WeightRecipe::InverseSquaredLength, WeightRecipe::AreaWeightedLength}) {
        QuadraticWeights w = quadraticWeights(s, z, recipe);
        REQUIRE(w.alpha.size() == s.edgeCount());
        REQUIRE(w.beta.size() == s.interiorEdgeCount());
        for (int e = 0; e < s.edgeCount(); ++e) {
            double l = z.lengths[e];
            Eigen::Vector3d l0 = faceLengths(s, z.lengths, s.edgeFace(e, 0));
            double d = faceArea(l0[0], l0[1], l0[2]);
            if (!s.isBoundaryEdge(e)) {
                Eigen::Vector3d l1 = faceLengths(s, z.lengths, s.edgeFace(e, 1));
                d += faceArea(l1[0], l1[1], l1[2]);
            }
            d /= 3.0;
            double expectedAlpha = recipe == WeightRecipe::AreaWeightedLength
                                       ? d / (l * l)
                                       : 1.0 / (l * l);
            CHECK(relError(w.alpha[e], expectedAlpha) < 1e-13);
            if (!s.isBoundaryEdge(e))
                CHECK(relError(w.beta[s.interiorEdgeIndex(e)], l * l / d) < 1e-13);
        }
    }
}

TEST_CASE("quadratic energy closed form") {
    MaterialParameters p{kMu, kLambda, 1e-2};
    Mesh m = grid(2, 2);
    SimplicialSurface s = m.surface();
    NricVector z = forwardMap(s, m.positions);
    QuadraticWeights w = quadraticWeights(s, z);
    QuadraticEnergy energy(s, w, p);
    // single length offset of 0.3 -> alpha_e * 0.09
    NricVector zt = z;
    zt.lengths[2] += 0.3;
    CHECK(relError(energy.value(z, zt), w.alpha[2] * 0.09) < 1e-13);
    // single angle offset -> delta^2 beta_j dtheta^2
    NricVector za = z;
    za.angles[1] += 0.25;
    CHECK(relError(energy.value(z, za), p.delta * p.delta * w.beta[1] * 0.0625) < 1e-13);
    // Hessian is the constant diagonal (2 alpha, 2 delta^2 beta)
    EnergyDerivatives d = energy.derivatives(z, zt, true);
    Eigen::MatrixXd h = dense(d.hess22);
    for (int e = 0; e < s.edgeCount(); ++e)
        CHECK(relError(h(e, e), 2 * w.alpha[e]) < 1e-13);
    for (int j = 0; j < s.interiorEdgeCount(); ++j)
        CHECK(relError(h(s.edgeCount() + j, s.edgeCount() + j),
                       2 * p.delta * p.delta * w.beta[j]) < 1e-13);
    CHECK((h.diagonal().asDiagonal().toDenseMatrix() - h).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nonlinear energy: global minimum at identity") {
    MaterialParameters p{kMu, kLambda, 1e-2};
    Mesh m = grid(3, 3, 0.9, [](double x, double y) { return 0.3 * std::cos(x * y); });
    SimplicialSurface s = m.surface();
    NricVector z = forwardMap(s, m.positions);
    NonlinearEnergy energy(s, p);
    CHECK(std::abs(energy.value(z, z)) < 1e-14);
    EnergyDerivatives d = energy.derivatives(z, z, true);
    CHECK(d.grad2.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.grad1.cwiseAbs().maxCoeff() < 1e-12);
    // positive away from identity
    std::mt19937 rng(2);
    NricVector zt = perturbFeasible(s, z, 0.05, rng);
    CHECK(energy.value(z, zt) > 0.0);
}

TEST_CASE("energy derivatives match finite differences") {
    std::mt19937 rng(17);
    Mesh m = grid(3, 2, 1.0, [](double x, double y) { return 0.2 * std::sin(2 * x - y); });
    SimplicialSurface s = m.surface();
    NricVector z0 = forwardMap(s, m.positions);
    MaterialParameters p{kMu, kLambda, 0.5};  // sizable bending term
    NonlinearEnergy nonlinear(s, p);
    QuadraticEnergy quadratic(s, quadraticWeights(s, z0), p);
    const double h = 1e-5;
    const int n = s.nricDim();

    for (const DeformationEnergy* energy :
         std::initializer_list<const DeformationEnergy*>{&nonlinear, &quadratic}) {
        for (int trial = 0; trial < 5; ++trial) {
            NricVector z = perturbFeasible(s, z0, 0.04, rng);
            NricVector zt = perturbFeasible(s, z0, 0.04, rng);
            EnergyDerivatives d = energy->derivatives(z, zt, true);
            CHECK(std::abs(d.value - energy->value(z, zt)) < 1e-12);

            Eigen::VectorXd fdG2(n), fdG1(n);
            Eigen::VectorXd zFlat = z.stacked(), ztFlat = zt.stacked();
            for (int c = 0; c < n; ++c) {
                Eigen::VectorXd up = ztFlat, dn = ztFlat;
                up[c] += h;
                dn[c] -= h;
                fdG2[c] = (energy->value(z, NricVector::fromStacked(s, up)) -
                           energy->value(z, NricVector::fromStacked(s, dn))) /
                          (2 * h);
                Eigen::VectorXd up1 = zFlat, dn1 = zFlat;
                up1[c] += h;
                dn1[c] -= h;
                fdG1[c] = (energy->value(NricVector::fromStacked(s, up1), zt) -
                           energy->value(NricVector::fromStacked(s, dn1), zt)) /
                          (2 * h);
            }
            CHECK(relErrorM(d.grad2, fdG2) < 1e-6);
            CHECK(relErrorM(d.grad1, fdG1) < 1e-6);

            Eigen::MatrixXd fdH22(n, n), fdH11(n, n), fdH12(n, n);
            for (int c = 0; c < n; ++c) {
                Eigen::VectorXd up = ztFlat, dn = ztFlat;
                up[c] += h;
                dn[c] -= h;
                EnergyDerivatives du =
                    energy->derivatives(z, NricVector::fromStacked(s, up), true);
                EnergyDerivatives dd =
                    energy->derivatives(z, NricVector::fromStacked(s, dn), true);
                fdH22.col(c) = (du.grad2 - dd.grad2) / (2 * h);
                fdH12.col(c) = (du.grad1 - dd.grad1) / (2 * h);
                Eigen::VectorXd up1 = zFlat, dn1 = zFlat;
                up1[c] += h;
                dn1[c] -= h;
                EnergyDerivatives du1 =
                    energy->derivatives(NricVector::fromStacked(s, up1), zt, true);
                EnergyDerivatives dd1 =
                    energy->derivatives(NricVector::fromStacked(s, dn1), zt, true);
                fdH11.col(c) = (du1.grad1 - dd1.grad1) / (2 * h);
            }
            CHECK(relErrorM(dense(d.hess22), fdH22) < 1e-5);
            CHECK(relErrorM(dense(d.hess11), fdH11) < 1e-5);
            CHECK(relErrorM(dense(d.hess12), fdH12) < 1e-5);
            CHECK(relErrorM(dense(d.hess22), dense(d.hess22).transpose()) < 1e-12);
            CHECK(relErrorM(dense(d.hess11), dense(d.hess11).transpose()) < 1e-12);
        }
    }
}

TEST_CASE("infeasible second argument: sentinel value, throwing derivatives") {
    MaterialParameters p{kMu, kLambda, 1e-2};
    Mesh m = grid(2, 2);
    SimplicialSurface s = m.surface();
    NricVector z = forwardMap(s, m.positions);
    NricVector zt = z;
    zt.lengths[0] = 50.0;
    NonlinearEnergy energy(s, p);
    CHECK(energy.value(z, zt) >= kInfSentinel);
    CHECK(std::isfinite(energy.value(z, zt)));
    CHECK_THROWS_AS(energy.derivatives(z, zt, false), InfeasiblePoint);
}

TEST_CASE("Riemannian metric is half the identity Hessian and PSD") {
    MaterialParameters p{kMu, kLambda, 1e-2};
    Mesh m = grid(3, 2, 0.8, [](double x, double y) { return 0.1 * x + 0.2 * y * y; });
    SimplicialSurface s = m.surface();
    NricVector z = forwardMap(s, m.positions);
    for (EnergyKind kind : {EnergyKind::Nonlinear, EnergyKind::Quadratic}) {
        Eigen::SparseMatrix<double> g = riemannianMetric(s, z, p, kind);
        EnergyDerivatives d =
            kind == EnergyKind::Nonlinear
                ? NonlinearEnergy(s, p).derivatives(z, z, false)
                : QuadraticEnergy(s, quadraticWeights(s, z), p).derivatives(z, z, false);
        CHECK(relErrorM(dense(g), 0.5 * dense(d.hess22)) < 1e-13);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense(g));
        CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    }
}
