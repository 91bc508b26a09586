#include "erep/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "erep/errors.hpp"

namespace erep {

namespace {

Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& eq, const Eigen::MatrixXd& in,
                           const std::vector<int>& active) {
    long n = std::max(eq.cols(), in.cols());
    Eigen::MatrixXd out(eq.rows() + static_cast<long>(active.size()), n);
    if (eq.rows() > 0) out.topRows(eq.rows()) = eq;
    for (size_t k = 0; k < active.size(); ++k)
        out.row(eq.rows() + static_cast<long>(k)) = in.row(active[k]);
    return out;
}

// Orthonormal basis of the null space of C (rows = constraints). Empty C ->
// identity.
Eigen::MatrixXd null_basis(const Eigen::MatrixXd& C, long n) {
    if (C.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    lu.setThreshold(1e-12);
    Eigen::MatrixXd K = lu.kernel();
    if (K.cols() == 1 && K.isZero(0.0)) return Eigen::MatrixXd(n, 0);  // trivial kernel
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, K.cols());
    return Q;
}

}  // namespace

QpResult solve_qp(const QpProblem& p, const Eigen::VectorXd& z0, double tol, int max_iter) {
    const long n = p.H.rows();
    const long me = p.Ceq.rows();
    const long mi = p.Cin.rows();
    if (p.H.cols() != n || p.q.size() != n) throw SolverError("qp: bad H/q dimensions");
    if (me > 0 && p.Ceq.cols() != n) throw SolverError("qp: bad Ceq dimensions");
    if (mi > 0 && p.Cin.cols() != n) throw SolverError("qp: bad Cin dimensions");
    if (p.deq.size() != me || p.ein.size() != mi) throw SolverError("qp: bad rhs dimensions");
    if (z0.size() != n) throw SolverError("qp: bad start dimension");
    if (max_iter <= 0) max_iter = 60 * static_cast<int>(n + mi) + 200;

    const double zscale = 1.0 + z0.lpNorm<Eigen::Infinity>();
    const double ftol = 1e-9 * zscale;
    if (me > 0 && (p.Ceq * z0 - p.deq).lpNorm<Eigen::Infinity>() > ftol)
        throw SolverError("qp: start point violates equality constraints");
    if (mi > 0 && ((p.Cin * z0 - p.ein).array() > ftol).any())
        throw SolverError("qp: start point violates inequality constraints");

    Eigen::VectorXd z = z0;
    std::vector<bool> in_ws(static_cast<size_t>(mi), false);
    if (mi > 0) {
        Eigen::VectorXd slack = p.ein - p.Cin * z;
        for (long i = 0; i < mi; ++i)
            if (slack[i] <= 1e-12 * zscale) in_ws[static_cast<size_t>(i)] = true;
    }

    QpResult res;
    res.mult_eq = Eigen::VectorXd::Zero(me);
    res.mult_in = Eigen::VectorXd::Zero(mi);

    for (int iter = 1; iter <= max_iter; ++iter) {
        res.iterations = iter;
        std::vector<int> active;
        for (long i = 0; i < mi; ++i)
            if (in_ws[static_cast<size_t>(i)]) active.push_back(static_cast<int>(i));

        Eigen::MatrixXd Cw = stack_rows(p.Ceq, p.Cin, active);
        Eigen::VectorXd grad = p.H * z + p.q;
        const double gscale = 1.0 + grad.lpNorm<Eigen::Infinity>();

        Eigen::MatrixXd K = null_basis(Cw, n);
        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        bool ray = false;

        if (K.cols() > 0) {
            Eigen::MatrixXd Hr = K.transpose() * p.H * K;
            Eigen::VectorXd gr = K.transpose() * grad;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Hr);
            const Eigen::VectorXd& ev = eig.eigenvalues();
            const Eigen::MatrixXd& V = eig.eigenvectors();
            double eth = 1e-11 * std::max(1.0, ev.cwiseAbs().maxCoeff());

            Eigen::VectorXd y = Eigen::VectorXd::Zero(K.cols());
            Eigen::VectorXd raydir = Eigen::VectorXd::Zero(K.cols());
            double flat_grad = 0.0;
            for (long j = 0; j < ev.size(); ++j) {
                double comp = V.col(j).dot(gr);
                if (ev[j] > eth) {
                    y -= V.col(j) * (comp / ev[j]);
                } else if (std::abs(comp) > 1e-12 * gscale) {
                    raydir -= V.col(j) * comp;  // linear descent in a flat direction
                    flat_grad = std::max(flat_grad, std::abs(comp));
                }
            }
            if (flat_grad > 0.0) {
                step = K * raydir;
                ray = true;
            } else {
                step = K * y;
            }
        }

        if (!ray && step.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
            // Subspace optimum: check multipliers for the working set.
            Eigen::MatrixXd At = Cw.transpose();  // n x (me + |active|)
            Eigen::VectorXd m;
            if (At.cols() > 0) {
                m = At.completeOrthogonalDecomposition().solve(-grad);
            } else {
                m = Eigen::VectorXd::Zero(0);
            }
            double stat = (At.cols() > 0 ? (At * m + grad).lpNorm<Eigen::Infinity>()
                                         : grad.lpNorm<Eigen::Infinity>());

            int drop = -1;
            double most_neg = -tol * gscale;
            for (size_t k = 0; k < active.size(); ++k) {
                double mk = m[me + static_cast<long>(k)];
                if (mk < most_neg) {  // first (lowest-index) most negative
                    most_neg = mk;
                    drop = active[k];
                }
            }
            if (drop < 0) {
                res.z = z;
                res.mult_eq = m.head(me);
                res.mult_in.setZero(mi);
                for (size_t k = 0; k < active.size(); ++k)
                    res.mult_in[active[k]] = m[me + static_cast<long>(k)];
                res.stationarity = stat;
                res.optimal = stat <= 100.0 * tol * gscale;
                return res;
            }
            in_ws[static_cast<size_t>(drop)] = false;
            continue;
        }

        // Line search toward the subspace target (alpha = 1) or along the ray.
        double alpha = ray ? std::numeric_limits<double>::infinity() : 1.0;
        int blocker = -1;
        for (long i = 0; i < mi; ++i) {
            if (in_ws[static_cast<size_t>(i)]) continue;
            double d = p.Cin.row(i).dot(step);
            if (d <= 1e-14 * gscale) continue;
            double a = (p.ein[i] - p.Cin.row(i).dot(z)) / d;
            if (a < alpha - 1e-14) {
                alpha = a;
                blocker = static_cast<int>(i);
            }
        }
        if (ray && blocker < 0)
            throw SolverError("qp: unbounded descent direction (problem not bounded below)");
        if (alpha < 0.0) alpha = 0.0;  // degenerate: just activate the blocker
        z += alpha * step;
        if (blocker >= 0) in_ws[static_cast<size_t>(blocker)] = true;
    }

    // Iteration cap: return the current (feasible) iterate un-certified.
    res.z = z;
    res.optimal = false;
    res.stationarity = std::numeric_limits<double>::quiet_NaN();
    return res;
}

}  // namespace erep
