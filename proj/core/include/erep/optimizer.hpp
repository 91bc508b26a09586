#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "erep/market_data.hpp"

namespace erep {

// Symmetric positive-definite curvature accumulator, A = eps*I plus a sum of
// gradient outer products. PD is guaranteed by construction; the constructor
// only enforces symmetry.
struct CurvatureMatrix {
    Eigen::MatrixXd A;

    explicit CurvatureMatrix(Eigen::MatrixXd m);
    static CurvatureMatrix scaled_identity(int p, double eps);
    int order() const { return static_cast<int>(A.rows()); }
};

struct CompositeStepParams {
    double eta = 0.0;      // Newton learning rate, > 0
    double lambda = 0.0;   // group-norm weight, >= 0
    double epsilon = 0.0;  // initial curvature, > 0
    double inner_tol = 1e-8;
    int inner_max_iter = 20000;

    void validate() const;
};

// max over groups of the within-group l1 mass; groups may overlap.
double group_norm(const Eigen::VectorXd& w, const Grouping& grouping);

// Subgradient: sign(w_i) (sign(0) = +1) on the lowest-index maximizing
// group, 0 elsewhere. A fixed tie rule keeps runs deterministic.
Eigen::VectorXd group_norm_subgradient(const Eigen::VectorXd& w, const Grouping& grouping);

// D_A(w||x) = 1/2 (w-x)'A(w-x).
double bregman(const CurvatureMatrix& A, const Eigen::VectorXd& w, const Eigen::VectorXd& x);

// A + grad grad' (rank-1).
CurvatureMatrix update_curvature(const CurvatureMatrix& A, const Eigen::VectorXd& grad);

// Euclidean projection onto the probability simplex (sort and threshold).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

struct StepResult {
    Eigen::VectorXd w;
    bool converged = false;   // optimality certified
    int iterations = 0;
    double kkt_residual = 0;  // stationarity residual from the solver
};

// argmin over the simplex of <grad, w - w_prev> + lambda * L(w)
//                            + eta * D_A(w || w_prev).
// Solved exactly: for lambda = 0 it is a strictly convex QP; otherwise the
// group-norm term is lifted into an epigraph variable (on the simplex
// |w_i| = w_i, so each group constraint is linear) and the same active-set
// kernel applies. On failure to certify within inner_max_iter the best
// feasible iterate is returned with converged = false.
StepResult composite_newton_step(const Eigen::VectorXd& grad, const CurvatureMatrix& A,
                                 const Eigen::VectorXd& w_prev,
                                 const CompositeStepParams& params, const Grouping& grouping);

// Exhaustive minimizer over the simplex grid with spacing `step`
// (dim in {2,3,4}); the test oracle for every solver in the project.
std::pair<Eigen::VectorXd, double> brute_force_simplex_min(
    const std::function<double(const Eigen::VectorXd&)>& objective, int dim, double step);

struct TheoryParams {
    double eta = 0;
    double epsilon0 = 0;
};

// eta = 1/2 min(alpha, 1/(4GD)); epsilon0 = 1/(eta^2 D^2). The documented
// default initializer for CompositeStepParams given per-dataset (alpha, G, D).
TheoryParams theory_eta(double alpha, double G, double D);

}  // namespace erep
