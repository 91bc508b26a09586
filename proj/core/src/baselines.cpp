#include "erep/baselines.hpp"

#include <cmath>

#include "erep/errors.hpp"
#include "erep/qp.hpp"

namespace erep {

void OrsadParams::validate(int m) const {
    if (eta_orsad < 0.0) throw ConfigError("orsad eta must be >= 0");
    if (K != 0.0) {
        if (!(K > 0.0)) throw ConfigError("orsad K must be > 0");
        if (K < 1.0 / m - 1e-12)
            throw ConfigError("orsad K below 1/m leaves the feasible set empty");
    }
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, const Grouping& grouping,
                                       double K) {
    const long n = v.size();
    if (grouping.dim != n) throw ConfigError("projection: dimension mismatch");

    QpProblem qp;
    qp.H = Eigen::MatrixXd::Identity(n, n);
    qp.q = -v;
    qp.Ceq = Eigen::MatrixXd::Ones(1, n);
    qp.deq = Eigen::VectorXd::Ones(1);
    const long m = grouping.m();
    qp.Cin = Eigen::MatrixXd::Zero(n + m, n);
    qp.ein = Eigen::VectorXd::Zero(n + m);
    for (long i = 0; i < n; ++i) qp.Cin(i, i) = -1.0;
    for (long j = 0; j < m; ++j) {
        for (int i : grouping.groups[static_cast<size_t>(j)]) qp.Cin(n + j, i) = 1.0;
        qp.ein[n + j] = K;
    }

    // Feasible start: equal mass per group, spread uniformly inside each
    // group (for a partition every group then holds exactly 1/m <= K).
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(n);
    for (long j = 0; j < m; ++j) {
        const auto& g = grouping.groups[static_cast<size_t>(j)];
        for (int i : g) z0[i] += 1.0 / (static_cast<double>(m) * g.size());
    }
    if (group_norm(z0, grouping) > K + 1e-12)
        throw SolverError("projection: could not construct a feasible start (K too tight)");

    QpResult r = solve_qp(qp, z0);
    if (!r.optimal) throw SolverError("projection onto capped simplex failed to certify");
    Eigen::VectorXd w = r.z;
    for (long i = 0; i < n; ++i) w[i] = std::max(w[i], 0.0);
    return w / w.sum();
}

OrsadStepResult orsad_step(const Portfolio& b_prev, const Eigen::VectorXd& x_t,
                           const OrsadParams& params, const Grouping& stock_grouping) {
    const long n = b_prev.size();
    if (x_t.size() != n) throw DataError("orsad step: dimension mismatch");
    if (!x_t.allFinite() || x_t.minCoeff() <= 0.0)
        throw DataError("orsad step: market row must be finite and > 0");
    params.validate(stock_grouping.m());
    const double K = params.K;
    const double eta = params.eta_orsad;

    // Feasibility of the previous point (the precondition): project if the
    // caller handed us something slightly off due to round-off.
    Eigen::VectorXd b = b_prev.weights();
    if (group_norm(b, stock_grouping) > K + 1e-9)
        throw DataError("orsad step: previous portfolio violates the group cap");

    // Gradient Lipschitz bound on the feasible set: <b,x> >= min_i x_i.
    double xmin = x_t.minCoeff();
    double L = 1.0 + eta * x_t.squaredNorm() / (xmin * xmin);
    double gamma = 1.0 / L;

    bool converged = false;
    int iterations = 0;
    const int cap = 20000;
    for (int it = 1; it <= cap; ++it) {
        iterations = it;
        double inner = b.dot(x_t);
        Eigen::VectorXd g = -eta / inner * x_t + (b - b_prev.weights());
        Eigen::VectorXd next = project_capped_simplex(b - gamma * g, stock_grouping, K);
        double move = (next - b).lpNorm<Eigen::Infinity>();
        b = std::move(next);
        if (move <= 1e-13) {
            converged = true;
            break;
        }
    }
    return OrsadStepResult{Portfolio(b), converged, iterations};
}

OrsadRun orsad_run(const MarketSeries& market, const OrsadParams& params,
                   const Grouping& stock_grouping) {
    OrsadParams p = params;
    const int m = stock_grouping.m();
    if (p.K == 0.0) p.K = 0.5 * (1.0 / m + 1.0);
    if (p.eta_orsad == 0.0) {
        // Theory-style default from the dataset's gradient bound over stocks.
        double G = 0.0;
        for (long t = 0; t < market.T(); ++t) {
            Eigen::VectorXd x = market.relatives.row(t).transpose();
            G = std::max(G, x.norm() / x.minCoeff());
        }
        p.eta_orsad = theory_eta(1.0, G, std::sqrt(2.0)).eta;
    }
    p.validate(m);

    OrsadRun run;
    run.eta_used = p.eta_orsad;
    run.K_used = p.K;
    Eigen::VectorXd start = Eigen::VectorXd::Constant(market.n(), 1.0 / market.n());
    Portfolio b = Portfolio(project_capped_simplex(start, stock_grouping, p.K));
    double lw = 0.0;
    for (long t = 0; t < market.T(); ++t) {
        Eigen::VectorXd x = market.relatives.row(t).transpose();
        run.b_seq.push_back(b.weights());
        double r = b.weights().dot(x);
        if (!(r > 0.0)) throw DataError("orsad: nonpositive wealth factor");
        run.ret.push_back(r);
        lw += std::log(r);
        run.log_wealth.push_back(lw);
        OrsadStepResult step = orsad_step(b, x, p, stock_grouping);
        if (!step.converged) run.solver_warnings += 1;
        b = step.b;
    }
    return run;
}

Trajectory maons_run(const std::vector<StrategySpec>& bases, const MarketSeries& market,
                     const RunParams& params) {
    std::vector<int> all(static_cast<size_t>(market.n()));
    for (int i = 0; i < market.n(); ++i) all[static_cast<size_t>(i)] = i;

    RunParams p = params;
    p.bases = bases;
    p.lambda = 0.0;
    p.sectors = make_grouping({"all"}, {all}, market.n());
    return run_ensemble(market, p);
}

}  // namespace erep
