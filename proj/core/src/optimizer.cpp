#include "erep/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "erep/errors.hpp"
#include "erep/qp.hpp"

namespace erep {

CurvatureMatrix::CurvatureMatrix(Eigen::MatrixXd m) : A(std::move(m)) {
    if (A.rows() != A.cols() || A.rows() < 1)
        throw SolverError("curvature matrix must be square and nonempty");
    if ((A - A.transpose()).lpNorm<Eigen::Infinity>() >
        1e-12 * std::max(1.0, A.lpNorm<Eigen::Infinity>()))
        throw SolverError("curvature matrix must be symmetric");
}

CurvatureMatrix CurvatureMatrix::scaled_identity(int p, double eps) {
    if (p < 1) throw SolverError("curvature order must be >= 1");
    if (!(eps > 0.0)) throw SolverError("curvature epsilon must be > 0");
    return CurvatureMatrix(eps * Eigen::MatrixXd::Identity(p, p));
}

void CompositeStepParams::validate() const {
    if (!(eta > 0.0)) throw ConfigError("step eta must be > 0");
    if (!(epsilon > 0.0)) throw ConfigError("step epsilon must be > 0");
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (!(inner_tol > 0.0)) throw ConfigError("inner_tol must be > 0");
    if (inner_max_iter < 1) throw ConfigError("inner_max_iter must be >= 1");
}

double group_norm(const Eigen::VectorXd& w, const Grouping& grouping) {
    if (grouping.dim != w.size()) throw ConfigError("group_norm: dimension mismatch");
    double best = 0.0;
    for (const auto& g : grouping.groups) {
        if (g.empty()) throw ConfigError("group_norm: empty group");
        double s = 0.0;
        for (int i : g) s += std::abs(w[i]);
        best = std::max(best, s);
    }
    return best;
}

Eigen::VectorXd group_norm_subgradient(const Eigen::VectorXd& w, const Grouping& grouping) {
    if (grouping.dim != w.size()) throw ConfigError("group_norm: dimension mismatch");
    int best_j = -1;
    double best = -1.0;
    for (int j = 0; j < grouping.m(); ++j) {
        double s = 0.0;
        for (int i : grouping.groups[static_cast<size_t>(j)]) s += std::abs(w[i]);
        if (s > best) {  // strict: ties keep the lowest group index
            best = s;
            best_j = j;
        }
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(w.size());
    for (int i : grouping.groups[static_cast<size_t>(best_j)])
        v[i] = (w[i] >= 0.0) ? 1.0 : -1.0;
    return v;
}

double bregman(const CurvatureMatrix& A, const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
    if (w.size() != A.order() || x.size() != A.order())
        throw SolverError("bregman: dimension mismatch");
    Eigen::VectorXd d = w - x;
    return 0.5 * d.dot(A.A * d);
}

CurvatureMatrix update_curvature(const CurvatureMatrix& A, const Eigen::VectorXd& grad) {
    if (grad.size() != A.order()) throw SolverError("update_curvature: dimension mismatch");
    if (!grad.allFinite()) throw SolverError("update_curvature: nonfinite gradient");
    return CurvatureMatrix(A.A + grad * grad.transpose());
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    if (!v.allFinite()) throw SolverError("project_simplex: nonfinite input");
    const long n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    for (long k = 0; k < n; ++k) {
        css += u[static_cast<size_t>(k)];
        double cand = (css - 1.0) / static_cast<double>(k + 1);
        if (u[static_cast<size_t>(k)] - cand > 0.0) theta = cand;
    }
    return (v.array() - theta).max(0.0);
}

StepResult composite_newton_step(const Eigen::VectorXd& grad, const CurvatureMatrix& A,
                                 const Eigen::VectorXd& w_prev,
                                 const CompositeStepParams& params, const Grouping& grouping) {
    params.validate();
    const long p = w_prev.size();
    if (grad.size() != p || A.order() != p || grouping.dim != p)
        throw SolverError("composite step: dimension mismatch");

    const bool lifted = params.lambda > 0.0;
    const long nz = lifted ? p + 1 : p;
    const long ng = lifted ? grouping.m() : 0;

    QpProblem qp;
    qp.H = Eigen::MatrixXd::Zero(nz, nz);
    qp.H.topLeftCorner(p, p) = params.eta * A.A;
    qp.q = Eigen::VectorXd::Zero(nz);
    qp.q.head(p) = grad - params.eta * (A.A * w_prev);
    if (lifted) qp.q[p] = params.lambda;

    qp.Ceq = Eigen::MatrixXd::Zero(1, nz);
    qp.Ceq.leftCols(p).setOnes();
    qp.deq = Eigen::VectorXd::Ones(1);

    qp.Cin = Eigen::MatrixXd::Zero(p + ng, nz);
    qp.ein = Eigen::VectorXd::Zero(p + ng);
    for (long i = 0; i < p; ++i) qp.Cin(i, i) = -1.0;  // w_i >= 0
    if (lifted) {
        for (long j = 0; j < ng; ++j) {  // sum over group <= s
            for (int i : grouping.groups[static_cast<size_t>(j)]) qp.Cin(p + j, i) = 1.0;
            qp.Cin(p + j, p) = -1.0;
        }
    }

    Eigen::VectorXd z0(nz);
    z0.head(p) = w_prev;
    if (lifted) z0[p] = group_norm(w_prev, grouping);

    QpResult r = solve_qp(qp, z0, std::min(params.inner_tol, 1e-9), params.inner_max_iter);

    Eigen::VectorXd w = r.z.head(p);
    // Polish round-off so the output satisfies the simplex invariants exactly.
    for (long i = 0; i < p; ++i)
        if (w[i] < 0.0) {
            if (w[i] < -1e-9) throw SolverError("composite step produced negative weight");
            w[i] = 0.0;
        }
    w /= w.sum();

    StepResult out;
    out.w = std::move(w);
    out.converged = r.optimal;
    out.iterations = r.iterations;
    out.kkt_residual = r.stationarity;
    return out;
}

std::pair<Eigen::VectorXd, double> brute_force_simplex_min(
    const std::function<double(const Eigen::VectorXd&)>& objective, int dim, double step) {
    if (dim < 2 || dim > 4)
        throw ConfigError("brute force oracle supports dim in {2,3,4}");
    if (!(step > 0.0) || step > 1e-2 * (1.0 + 1e-12))
        throw ConfigError("brute force oracle needs 0 < step <= 1e-2");
    const int N = static_cast<int>(std::lround(1.0 / step));

    Eigen::VectorXd best_w;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd w(dim);
    auto consider = [&](const Eigen::VectorXd& cand) {
        double val = objective(cand);
        if (val < best) {
            best = val;
            best_w = cand;
        }
    };

    if (dim == 2) {
        for (int i = 0; i <= N; ++i) {
            w << double(i) / N, double(N - i) / N;
            consider(w);
        }
    } else if (dim == 3) {
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N - i; ++j) {
                w << double(i) / N, double(j) / N, double(N - i - j) / N;
                consider(w);
            }
    } else {
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N - i; ++j)
                for (int k = 0; k <= N - i - j; ++k) {
                    w << double(i) / N, double(j) / N, double(k) / N,
                        double(N - i - j - k) / N;
                    consider(w);
                }
    }
    return {best_w, best};
}

TheoryParams theory_eta(double alpha, double G, double D) {
    if (!(alpha > 0.0) || !(G > 0.0) || !(D > 0.0))
        throw ConfigError("theory parameters must be > 0");
    TheoryParams t;
    t.eta = 0.5 * std::min(alpha, 1.0 / (4.0 * G * D));
    t.epsilon0 = 1.0 / (t.eta * t.eta * D * D);
    return t;
}

}  // namespace erep
