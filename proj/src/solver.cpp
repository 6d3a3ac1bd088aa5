#include "solver.hpp"

#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

namespace nric {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double>(to - from).count();
}

bool sentinelValued(const Eigen::VectorXd& q) {
    return (q.cwiseAbs().array() >= kInfSentinel).any();
}

}  // namespace

SolverConfig parseSolverConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    SolverConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::istringstream probe(line);
            std::string tok;
            if (probe >> tok)
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "mu0") cfg.mu0 = std::stod(val);
            else if (key == "lambda0") cfg.lambda0 = std::stod(val);
            else if (key == "mu_plus") cfg.muPlus = std::stod(val);
            else if (key == "eta_plus") cfg.etaPlus = std::stod(val);
            else if (key == "eps_Q") cfg.epsQ = std::stod(val);
            else if (key == "eps_L") cfg.epsL = std::stod(val);
            else if (key == "k_max") cfg.kMax = std::stoi(val);
            else if (key == "j_max") cfg.jMax = std::stoi(val);
            else if (key == "tau_plus") cfg.tauPlus = std::stod(val);
            else if (key == "beta_shift") cfg.betaShift = std::stod(val);
            else if (key == "armijo_sigma") cfg.armijoSigma = std::stod(val);
            else if (key == "backtrack") cfg.backtrack = std::stod(val);
            else if (key == "min_step") cfg.minStep = std::stod(val);
            else if (key == "bfgs_warm_start") cfg.bfgsWarmStart = (val == "1" || val == "true");
            else if (key == "bfgs_iterations") cfg.bfgsIterations = std::stoi(val);
            else throw ParseError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        } catch (const std::invalid_argument&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad value " + val);
        }
    }
    return cfg;
}

double augmentedLagrangian(const ConstrainedProblem& problem, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda, double mu) {
    double e = problem.energyValue(x);
    if (e >= kInfSentinel) return kInfSentinel;
    if (problem.constraintDim() == 0) return e;
    Eigen::VectorXd q = problem.constraintResidual(x);
    if (sentinelValued(q)) return kInfSentinel;
    return e - q.dot(lambda) + 0.5 * mu * q.squaredNorm();
}

void augmentedLagrangianDerivatives(const ConstrainedProblem& problem,
                                    const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                                    double mu, Eigen::VectorXd& grad,
                                    Eigen::SparseMatrix<double>& hess) {
    problem.energyDerivatives(x, grad, hess);
    if (problem.constraintDim() == 0) return;
    Eigen::VectorXd q = problem.constraintResidual(x);
    if (sentinelValued(q))
        throw InfeasiblePoint("augmented Lagrangian derivatives at an infeasible point");
    Eigen::VectorXd w = mu * q - lambda;
    Eigen::SparseMatrix<double> jac = problem.constraintJacobian(x);
    grad += jac.transpose() * w;
    hess += problem.constraintHessianContraction(x, w);
    hess += mu * Eigen::SparseMatrix<double>(jac.transpose() * jac);
}

namespace {

struct InnerOutcome {
    int iterations = 0;
    bool reachedTolerance = false;
    bool stalled = false;
    double gradNorm = 0.0;
};

// Line search Newton-type method with diagonal shifting (inner loop).
InnerOutcome newtonInner(const ConstrainedProblem& problem, Eigen::VectorXd& x,
                         const Eigen::VectorXd& lambda, double mu, double omega,
                         const SolverConfig& cfg, SolveReport& report) {
    const int n = problem.dim();
    Eigen::SparseMatrix<double> identity(n, n);
    identity.setIdentity();

    InnerOutcome out;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    for (int j = 0; j < cfg.jMax; ++j) {
        auto t0 = Clock::now();
        Eigen::VectorXd grad;
        Eigen::SparseMatrix<double> hess;
        augmentedLagrangianDerivatives(problem, x, lambda, mu, grad, hess);
        double value = augmentedLagrangian(problem, x, lambda, mu);
        auto t1 = Clock::now();
        report.evalSeconds += seconds(t0, t1);

        out.gradNorm = grad.norm();
        if (out.gradNorm <= omega) {
            out.reachedTolerance = true;
            return out;
        }

        // Diagonal shift keeping the factorization positive definite.
        double minDiag = hess.diagonal().minCoeff();
        double tau = minDiag > 0 ? 0.0 : -minDiag + cfg.betaShift;
        Eigen::VectorXd d;
        auto t2 = Clock::now();
        for (int attempt = 0;; ++attempt) {
            llt.compute(hess + tau * identity);
            if (llt.info() == Eigen::Success) {
                d = llt.solve(-grad);
                if (llt.info() == Eigen::Success) break;
            }
            if (attempt > 120)
                throw NricError("newtonInner: Cholesky failed for every diagonal shift");
            tau = std::max(cfg.tauPlus * tau, cfg.betaShift);
        }
        report.factorSeconds += seconds(t2, Clock::now());

        double slope = grad.dot(d);
        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= cfg.minStep) {
            double trial = augmentedLagrangian(problem, x + alpha * d, lambda, mu);
            if (trial <= value + cfg.armijoSigma * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (!accepted) {
            out.stalled = true;
            return out;
        }
        x += alpha * d;
        ++out.iterations;
        ++report.innerIterations;
    }
    return out;
}

// Limited-memory BFGS warm start on L(., lambda, mu).
void lbfgsWarmStart(const ConstrainedProblem& problem, Eigen::VectorXd& x,
                    const Eigen::VectorXd& lambda, double mu, const SolverConfig& cfg) {
    const int memory = 10;
    std::deque<Eigen::VectorXd> ss, ys;
    std::deque<double> rhos;
    auto gradient = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd g;
        Eigen::SparseMatrix<double> h;
        augmentedLagrangianDerivatives(problem, p, lambda, mu, g, h);
        return g;
    };
    Eigen::VectorXd g = gradient(x);
    for (int it = 0; it < cfg.bfgsIterations; ++it) {
        // Two-loop recursion.
        Eigen::VectorXd d = -g;
        std::vector<double> a(ss.size());
        for (int i = static_cast<int>(ss.size()) - 1; i >= 0; --i) {
            a[i] = rhos[i] * ss[i].dot(d);
            d -= a[i] * ys[i];
        }
        if (!ys.empty()) d *= ss.back().dot(ys.back()) / ys.back().squaredNorm();
        for (size_t i = 0; i < ss.size(); ++i) {
            double b = rhos[i] * ys[i].dot(d);
            d += (a[i] - b) * ss[i];
        }
        double slope = g.dot(d);
        if (slope >= 0) {
            d = -g;
            slope = g.dot(d);
        }
        double value = augmentedLagrangian(problem, x, lambda, mu);
        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= cfg.minStep) {
            if (augmentedLagrangian(problem, x + alpha * d, lambda, mu) <=
                value + cfg.armijoSigma * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (!accepted) return;
        Eigen::VectorXd xNew = x + alpha * d;
        Eigen::VectorXd gNew = gradient(xNew);
        Eigen::VectorXd s = xNew - x, y = gNew - g;
        double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            ss.push_back(s);
            ys.push_back(y);
            rhos.push_back(1.0 / sy);
            if (static_cast<int>(ss.size()) > memory) {
                ss.pop_front();
                ys.pop_front();
                rhos.pop_front();
            }
        }
        x = xNew;
        g = gNew;
    }
}

}  // namespace

std::string SolveReport::text() const {
    std::ostringstream os;
    os << "converged = " << (converged ? 1 : 0) << "\n"
       << "outer_iterations = " << outerIterations << "\n"
       << "inner_iterations = " << innerIterations << "\n"
       << "penalty_increases = " << penaltyIncreases << "\n"
       << "multiplier_updates = " << multiplierUpdates << "\n"
       << "line_search_stalled = " << (lineSearchStalled ? 1 : 0) << "\n"
       << "final_constraint_inf = " << finalConstraintInf << "\n"
       << "final_grad_norm = " << finalGradNorm << "\n"
       << "final_energy = " << finalEnergy << "\n"
       << "eval_seconds = " << evalSeconds << "\n"
       << "factor_seconds = " << factorSeconds << "\n"
       << "total_seconds = " << totalSeconds << "\n";
    if (!message.empty()) os << "message = " << message << "\n";
    return os.str();
}

SolveResult solveConstrained(const ConstrainedProblem& problem, const Eigen::VectorXd& x0,
                             const SolverConfig& config) {
    auto start = Clock::now();
    if (!problem.feasible(x0))
        throw InfeasibleStart("solveConstrained: initial point is infeasible");

    SolveResult result;
    result.x = x0;
    result.report = SolveReport{};
    SolveReport& report = result.report;

    const int m = problem.constraintDim();
    Eigen::VectorXd lambda = Eigen::VectorXd::Constant(m, config.lambda0);

    if (m == 0) {
        InnerOutcome inner =
            newtonInner(problem, result.x, lambda, 0.0, config.epsL, config, report);
        report.outerIterations = 1;
        report.converged = inner.reachedTolerance;
        report.lineSearchStalled = inner.stalled;
        report.finalGradNorm = inner.gradNorm;
        report.finalEnergy = problem.energyValue(result.x);
        report.totalSeconds = seconds(start, Clock::now());
        if (!report.converged)
            report.message = inner.stalled ? "line search stalled" : "inner iteration limit";
        result.multipliers = lambda;
        return result;
    }

    double mu = config.mu0;
    // Initial tolerances follow the penalty-update branch evaluated at mu0.
    double eta = std::max(std::pow(mu, -0.1), config.epsQ);
    double omega = 1.0 / mu;

    if (config.bfgsWarmStart) lbfgsWarmStart(problem, result.x, lambda, mu, config);

    for (int k = 0; k < config.kMax; ++k) {
        ++report.outerIterations;
        InnerOutcome inner = newtonInner(problem, result.x, lambda, mu,
                                         std::max(omega, 1e-12), config, report);
        report.lineSearchStalled = inner.stalled;

        Eigen::VectorXd q = problem.constraintResidual(result.x);
        double qInf = q.cwiseAbs().maxCoeff();
        report.finalConstraintInf = qInf;
        report.finalGradNorm = inner.gradNorm;

        if (qInf <= config.epsQ && inner.gradNorm <= config.epsL) {
            report.converged = true;
            break;
        }
        if (qInf <= eta) {
            lambda -= mu * q;
            ++report.multiplierUpdates;
            eta = std::max(eta / std::pow(mu, config.etaPlus), config.epsQ);
            omega /= mu;
        } else {
            mu *= config.muPlus;
            ++report.penaltyIncreases;
            eta = std::max(std::pow(mu, -0.1), config.epsQ);
            omega = 1.0 / mu;
        }
    }

    report.finalEnergy = problem.energyValue(result.x);
    report.totalSeconds = seconds(start, Clock::now());
    if (!report.converged) report.message = "outer iteration limit reached";
    result.multipliers = lambda;
    return result;
}

EliminatedProblem::EliminatedProblem(const ConstrainedProblem& inner, FixedCoordinates fixed)
    : inner_(&inner), fixed_(std::move(fixed)) {
    fullToFree_.assign(inner.dim(), 0);
    for (size_t i = 0; i < fixed_.indices.size(); ++i) {
        int idx = fixed_.indices[i];
        if (idx < 0 || idx >= inner.dim())
            throw ParseError("fixed coordinate index out of range");
        fullToFree_[idx] = -1;
    }
    for (int i = 0; i < inner.dim(); ++i) {
        if (fullToFree_[i] == 0) {
            fullToFree_[i] = static_cast<int>(freeIndices_.size());
            freeIndices_.push_back(i);
        }
    }
}

Eigen::VectorXd EliminatedProblem::embed(const Eigen::VectorXd& xFree) const {
    Eigen::VectorXd full(inner_->dim());
    for (size_t i = 0; i < freeIndices_.size(); ++i) full[freeIndices_[i]] = xFree[i];
    for (size_t i = 0; i < fixed_.indices.size(); ++i)
        full[fixed_.indices[i]] = fixed_.values[i];
    return full;
}

Eigen::VectorXd EliminatedProblem::restrict(const Eigen::VectorXd& xFull) const {
    Eigen::VectorXd xFree(freeIndices_.size());
    for (size_t i = 0; i < freeIndices_.size(); ++i) xFree[i] = xFull[freeIndices_[i]];
    return xFree;
}

bool EliminatedProblem::feasible(const Eigen::VectorXd& x) const {
    return inner_->feasible(embed(x));
}

double EliminatedProblem::energyValue(const Eigen::VectorXd& x) const {
    return inner_->energyValue(embed(x));
}

Eigen::SparseMatrix<double> EliminatedProblem::reduceSym(
    const Eigen::SparseMatrix<double>& h) const {
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < h.outerSize(); ++c) {
        int cf = fullToFree_[c];
        if (cf < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(h, c); it; ++it) {
            int rf = fullToFree_[it.row()];
            if (rf >= 0) trip.emplace_back(rf, cf, it.value());
        }
    }
    Eigen::SparseMatrix<double> out(dim(), dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

void EliminatedProblem::energyDerivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                                          Eigen::SparseMatrix<double>& hess) const {
    Eigen::VectorXd gFull;
    Eigen::SparseMatrix<double> hFull;
    inner_->energyDerivatives(embed(x), gFull, hFull);
    grad = restrict(gFull);
    hess = reduceSym(hFull);
}

Eigen::VectorXd EliminatedProblem::constraintResidual(const Eigen::VectorXd& x) const {
    return inner_->constraintResidual(embed(x));
}

Eigen::SparseMatrix<double> EliminatedProblem::constraintJacobian(
    const Eigen::VectorXd& x) const {
    Eigen::SparseMatrix<double> jac = inner_->constraintJacobian(embed(x));
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < jac.outerSize(); ++c) {
        int cf = fullToFree_[c];
        if (cf < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(jac, c); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), cf, it.value());
    }
    Eigen::SparseMatrix<double> out(jac.rows(), dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Eigen::SparseMatrix<double> EliminatedProblem::constraintHessianContraction(
    const Eigen::VectorXd& x, const Eigen::VectorXd& w) const {
    return reduceSym(inner_->constraintHessianContraction(embed(x), w));
}

FixedCoordinates parseConstraintFile(const std::string& path,
                                     const SimplicialSurface& surface, const NricVector& z0) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    const int ne = surface.edgeCount();
    std::map<int, double> fixed;  // stacked index -> value
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        auto fail = [&](const std::string& what) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + what);
        };
        if (tag == "L*") {
            for (int e = 0; e < ne; ++e) fixed[e] = z0.lengths[e];
        } else if (tag == "A*") {
            for (int j = 0; j < surface.interiorEdgeCount(); ++j)
                fixed[ne + j] = z0.angles[j];
        } else if (tag == "L" || tag == "A") {
            int e = 0;
            double v = 0.0;
            if (!(ss >> e >> v)) fail("expected '" + tag + " <edge> <value>'");
            if (e < 0 || e >= ne) fail("edge index out of range");
            if (tag == "L") {
                if (v <= 0) fail("length must be positive");
                fixed[e] = v;
            } else {
                int j = surface.interiorEdgeIndex(e);
                if (j < 0) fail("edge " + std::to_string(e) + " is a boundary edge");
                if (!(std::abs(v) < M_PI)) fail("angle must lie in (-pi, pi)");
                fixed[ne + j] = v;
            }
        } else {
            fail("unknown directive " + tag);
        }
    }
    FixedCoordinates out;
    out.values.resize(fixed.size());
    int i = 0;
    for (auto& [idx, v] : fixed) {
        out.indices.push_back(idx);
        out.values[i++] = v;
    }
    return out;
}

}  // namespace nric
