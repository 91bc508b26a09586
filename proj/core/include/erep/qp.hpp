#pragma once

#include <Eigen/Dense>

namespace erep {

// Dense convex quadratic program
//     min  1/2 z'Hz + q'z
//     s.t. Ceq z = deq,  Cin z <= ein
// solved by a primal active-set method (null-space form). H must be positive
// semidefinite; directions in which the reduced Hessian is singular are
// handled as linear descent rays that must hit a blocking constraint, which
// covers the epigraph formulations used across this project (the extra
// epigraph coordinate carries no curvature).
//
// Problems here are tiny (a few dozen variables), so everything is dense and
// exact: the result carries multipliers and the stationarity residual so
// callers can certify KKT optimality.
struct QpProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXd q;
    Eigen::MatrixXd Ceq;
    Eigen::VectorXd deq;
    Eigen::MatrixXd Cin;
    Eigen::VectorXd ein;
};

struct QpResult {
    Eigen::VectorXd z;
    bool optimal = false;     // KKT verified within tol
    int iterations = 0;
    double stationarity = 0;  // inf-norm of the stationarity residual
    Eigen::VectorXd mult_eq;  // equality multipliers
    Eigen::VectorXd mult_in;  // inequality multipliers (>= 0 where active)
};

// z0 must be feasible. Throws SolverError if it is not, or if an unbounded
// descent ray leaves the feasible set (impossible for a bounded problem).
// Hitting max_iter returns the best feasible iterate with optimal = false.
QpResult solve_qp(const QpProblem& p, const Eigen::VectorXd& z0, double tol = 1e-10,
                  int max_iter = 0 /* 0 -> automatic cap */);

}  // namespace erep
