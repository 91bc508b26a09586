#include "erep/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erep/errors.hpp"
#include "erep/qp.hpp"

namespace erep {

double cumulative_wealth(const std::vector<Eigen::VectorXd>& portfolios,
                         const MarketSeries& market) {
    if (static_cast<long>(portfolios.size()) != market.T())
        throw ConfigError("cumulative wealth: length mismatch");
    double wealth = 1.0;
    for (long t = 0; t < market.T(); ++t) {
        double factor = portfolios[static_cast<size_t>(t)].dot(market.relatives.row(t));
        if (!(factor > 0.0)) throw DataError("cumulative wealth: nonpositive daily factor");
        wealth *= factor;
    }
    return wealth;
}

double sharpe_ratio(const std::vector<double>& returns, int periods_per_year) {
    if (periods_per_year < 1) throw ConfigError("periods per year must be >= 1");
    const size_t n = returns.size();
    if (n < 2) throw DataError("sharpe ratio needs at least 2 returns");
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    double var = ss / static_cast<double>(n - 1);
    if (var <= 0.0) throw DataError("sharpe ratio undefined: zero return variance");
    return mean / std::sqrt(var) * std::sqrt(static_cast<double>(periods_per_year));
}

std::vector<double> simple_returns(const std::vector<double>& wealth_factors) {
    std::vector<double> out;
    out.reserve(wealth_factors.size());
    for (double f : wealth_factors) out.push_back(f - 1.0);
    return out;
}

std::vector<double> log_returns(const std::vector<double>& wealth_factors) {
    std::vector<double> out;
    out.reserve(wealth_factors.size());
    for (double f : wealth_factors) out.push_back(std::log(f));
    return out;
}

namespace {

// prox of gamma * L(.) restricted to the simplex, via the epigraph QP.
Eigen::VectorXd prox_group_norm_simplex(const Eigen::VectorXd& u, double gamma,
                                        const Grouping& eg) {
    const long p = u.size();
    if (gamma == 0.0) return project_simplex(u);

    QpProblem qp;
    qp.H = Eigen::MatrixXd::Zero(p + 1, p + 1);
    qp.H.topLeftCorner(p, p).setIdentity();
    qp.q = Eigen::VectorXd::Zero(p + 1);
    qp.q.head(p) = -u;
    qp.q[p] = gamma;
    qp.Ceq = Eigen::MatrixXd::Zero(1, p + 1);
    qp.Ceq.leftCols(p).setOnes();
    qp.deq = Eigen::VectorXd::Ones(1);
    const long m = eg.m();
    qp.Cin = Eigen::MatrixXd::Zero(p + m, p + 1);
    qp.ein = Eigen::VectorXd::Zero(p + m);
    for (long i = 0; i < p; ++i) qp.Cin(i, i) = -1.0;
    for (long j = 0; j < m; ++j) {
        for (int i : eg.groups[static_cast<size_t>(j)]) qp.Cin(p + j, i) = 1.0;
        qp.Cin(p + j, p) = -1.0;
    }

    Eigen::VectorXd z0(p + 1);
    z0.head(p) = project_simplex(u);
    z0[p] = group_norm(z0.head(p), eg);
    QpResult r = solve_qp(qp, z0);
    if (!r.optimal) throw SolverError("group-norm prox failed to certify");
    Eigen::VectorXd w = r.z.head(p);
    for (long i = 0; i < p; ++i) w[i] = std::max(w[i], 0.0);
    return w / w.sum();
}

}  // namespace

HindsightSolution best_fixed_allocation(const std::vector<Eigen::MatrixXd>& P_seq,
                                        const MarketSeries& market, double lambda,
                                        const Grouping& eg) {
    const long T = market.T();
    if (static_cast<long>(P_seq.size()) != T)
        throw ConfigError("hindsight: matrix sequence length mismatch");
    if (T < 1) throw ConfigError("hindsight: empty series");
    const long p = P_seq.front().cols();
    if (eg.dim != p) throw ConfigError("hindsight: grouping dimension mismatch");

    std::vector<Eigen::VectorXd> v(static_cast<size_t>(T));
    for (long t = 0; t < T; ++t) {
        v[static_cast<size_t>(t)] =
            P_seq[static_cast<size_t>(t)].transpose() * market.relatives.row(t).transpose();
        if (!(v[static_cast<size_t>(t)].minCoeff() > 0.0))
            throw DataError("hindsight: nonpositive reduced market vector");
    }
    const double reg_weight = static_cast<double>(T) * lambda;

    auto smooth = [&](const Eigen::VectorXd& w) {
        double f = 0.0;
        for (const auto& vt : v) f -= std::log(vt.dot(w));
        return f;
    };
    auto grad_smooth = [&](const Eigen::VectorXd& w) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
        for (const auto& vt : v) g -= vt / vt.dot(w);
        return g;
    };
    auto full = [&](const Eigen::VectorXd& w) {
        return smooth(w) + reg_weight * group_norm(w, eg);
    };

    HindsightSolution sol;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(p, 1.0 / p);
    Eigen::VectorXd y = w;
    double fw = full(w);
    double Lk = 1.0;
    double theta = 1.0;
    double best = fw;
    Eigen::VectorXd best_w = w;
    int stall = 0;
    const int max_iter = 1000000;
    double residual = std::numeric_limits<double>::infinity();
    double last_improvement = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= max_iter; ++it) {
        sol.iterations = it;
        double fy = smooth(y);
        Eigen::VectorXd gy = grad_smooth(y);

        Eigen::VectorXd w_next;
        while (true) {  // backtracking on the smooth majorant
            Eigen::VectorXd cand =
                prox_group_norm_simplex(y - gy / Lk, reg_weight / Lk, eg);
            Eigen::VectorXd diff = cand - y;
            double lhs = smooth(cand);
            double rhs = fy + gy.dot(diff) + 0.5 * Lk * diff.squaredNorm();
            if (lhs <= rhs + 1e-12 * std::abs(rhs)) {
                w_next = std::move(cand);
                break;
            }
            Lk *= 2.0;
            if (Lk > 1e18) throw SolverError("hindsight: backtracking diverged");
        }

        double f_next = full(w_next);
        residual = (w_next - y).lpNorm<Eigen::Infinity>();

        if (f_next > fw) {  // momentum overshoot: restart from the last point
            theta = 1.0;
            y = w;
            if (residual <= 1e-13) break;
            continue;
        }

        double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        y = w_next + ((theta - 1.0) / theta_next) * (w_next - w);
        y = project_simplex(y);  // keep the extrapolation inside the domain
        theta = theta_next;
        w = w_next;
        last_improvement = std::max(0.0, fw - f_next);
        fw = f_next;

        if (fw < best - 1e-9) {
            best = fw;
            best_w = w;
            stall = 0;
        } else {
            if (fw < best) {
                best = fw;
                best_w = w;
            }
            if (++stall >= 200) break;
        }
        if (residual <= 1e-13) break;
    }

    sol.w_star = best_w;
    sol.objective = best;
    // Gap estimate: the last per-iteration improvement when the stall rule
    // fired, else the prox fixed-point residual.
    sol.certificate = residual <= 1e-13 ? residual : last_improvement;
    sol.converged = stall >= 200 || residual <= 1e-13;

    // Degenerate-data check: a flat objective (e.g. identical columns every
    // round) makes any simplex point optimal; detect by scanning vertices.
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -vmin;
    for (long i = 0; i < p; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
        e[i] = 1.0;
        double f = full(e);
        vmin = std::min(vmin, f);
        vmax = std::max(vmax, f);
    }
    sol.flat_objective =
        std::abs(vmax - vmin) <= 1e-12 * (1.0 + std::abs(vmin)) &&
        std::abs(best - vmin) <= 1e-10 * (1.0 + std::abs(vmin));
    return sol;
}

std::vector<double> regret_curve(const std::vector<double>& online_reg_losses,
                                 const HindsightSolution& hindsight,
                                 const std::vector<Eigen::MatrixXd>& P_seq,
                                 const MarketSeries& market, double lambda,
                                 const Grouping& eg) {
    const long T = market.T();
    if (static_cast<long>(online_reg_losses.size()) != T ||
        static_cast<long>(P_seq.size()) != T)
        throw ConfigError("regret curve: length mismatch");

    const double reg_star = lambda * group_norm(hindsight.w_star, eg);
    std::vector<double> curve;
    curve.reserve(static_cast<size_t>(T));
    double cum = 0.0;
    for (long t = 0; t < T; ++t) {
        double hs = loss_g(market.relatives.row(t).transpose(), P_seq[static_cast<size_t>(t)],
                           hindsight.w_star) +
                    reg_star;
        cum += online_reg_losses[static_cast<size_t>(t)] - hs;
        curve.push_back(cum);
    }
    return curve;
}

Lemma2Report lemma2_report(const Trajectory& traj) {
    Lemma2Report rep;
    const long T = traj.T();
    if (T == 0) throw ConfigError("lemma2 report: empty trajectory");
    const long kd = traj.grad_seq.front().size();

    Eigen::MatrixXd A = traj.epsilon * Eigen::MatrixXd::Identity(kd, kd);
    double stat = 0.0;
    for (long t = 0; t < T; ++t) {
        const Eigen::VectorXd& g = traj.grad_seq[static_cast<size_t>(t)];
        A += g * g.transpose();
        stat += g.dot(A.ldlt().solve(g));
    }
    rep.statistic = stat;
    rep.bound = static_cast<double>(kd) * std::log(static_cast<double>(T));
    rep.satisfied = stat <= rep.bound;
    rep.replay_gap = std::abs(stat - traj.lemma2_cum.back());
    return rep;
}

std::vector<double> WalkForwardSpec::default_grid() {
    return {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
}

namespace {

struct Schedule {
    std::vector<int> active;  // candidate index per round (0-based rounds)
    bool prefix_flagged = false;
};

// Selection schedule: grid median until the first full window; from then on,
// re-pick the trailing-window Sharpe maximizer (ties -> smaller lambda)
// every `every` rounds.
Schedule build_schedule(const std::vector<Trajectory>& runs, long T, int window, int every,
                        int median_idx, int periods_per_year) {
    Schedule sch;
    sch.active.assign(static_cast<size_t>(T), median_idx);
    if (window > T) {
        sch.prefix_flagged = true;
        return sch;
    }
    int current = median_idx;
    long next_recal = window;  // 1-based round after which we recalibrate
    for (long t = 1; t <= T; ++t) {
        if (t > window) sch.active[static_cast<size_t>(t - 1)] = current;
        if (t == next_recal && t < T) {
            double best_sharpe = -std::numeric_limits<double>::infinity();
            int best_idx = -1;
            for (size_t c = 0; c < runs.size(); ++c) {
                std::vector<double> rets;
                rets.reserve(static_cast<size_t>(window));
                for (long s = t - window; s < t; ++s)
                    rets.push_back(runs[c].ret[static_cast<size_t>(s)] - 1.0);
                double sh;
                try {
                    sh = sharpe_ratio(rets, periods_per_year);
                } catch (const DataError&) {
                    continue;  // degenerate window: candidate not selectable
                }
                if (sh > best_sharpe) {  // strict: ties keep the smaller lambda
                    best_sharpe = sh;
                    best_idx = static_cast<int>(c);
                }
            }
            if (best_idx >= 0) current = best_idx;
            next_recal += every;
        }
    }
    return sch;
}

Trajectory stitch(const std::vector<Trajectory>& runs, const Schedule& sch, long T) {
    Trajectory out;
    const Trajectory& first = runs.front();
    out.eg = first.eg;
    out.column_names = first.column_names;
    out.eta = first.eta;
    out.epsilon = first.epsilon;
    out.G = first.G;
    out.lambda = std::numeric_limits<double>::quiet_NaN();  // varies by round

    double lw = 0.0;
    double lemma2_cum = 0.0;
    for (long t = 0; t < T; ++t) {
        const Trajectory& r = runs[static_cast<size_t>(sch.active[static_cast<size_t>(t)])];
        const size_t ti = static_cast<size_t>(t);
        out.loss.push_back(r.loss[ti]);
        out.reg_loss.push_back(r.reg_loss[ti]);
        out.ret.push_back(r.ret[ti]);
        lw += std::log(r.ret[ti]);
        out.log_wealth.push_back(lw);
        out.lemma2_term.push_back(r.lemma2_term[ti]);
        lemma2_cum += r.lemma2_term[ti];
        out.lemma2_cum.push_back(lemma2_cum);
        out.max_sector_exposure.push_back(r.max_sector_exposure[ti]);
        out.warned.push_back(r.warned[ti]);
        if (r.warned[ti]) out.solver_warnings += 1;
        out.w_seq.push_back(r.w_seq[ti]);
        out.b_seq.push_back(r.b_seq[ti]);
        out.grad_seq.push_back(r.grad_seq[ti]);
        out.P_seq.push_back(r.P_seq[ti]);
    }
    return out;
}

}  // namespace

WalkForwardResult walk_forward_lambda(const MarketSeries& market, const RunParams& base_params,
                                      const WalkForwardSpec& spec, int periods_per_year) {
    if (spec.window < 2) throw ConfigError("walk-forward window must be >= 2");
    if (spec.grid.empty()) throw ConfigError("walk-forward grid must be nonempty");

    WalkForwardResult res;
    res.grid = spec.grid;
    std::sort(res.grid.begin(), res.grid.end());
    res.grid.erase(std::unique(res.grid.begin(), res.grid.end()), res.grid.end());
    for (double l : res.grid)
        if (l < 0.0) throw ConfigError("walk-forward grid lambdas must be >= 0");

    for (double l : res.grid) {
        RunParams p = base_params;
        p.lambda = l;
        res.candidate_runs.push_back(run_ensemble(market, p));
    }

    const long T = market.T();
    const int every = spec.recalibrate_every > 0 ? spec.recalibrate_every
                                                 : std::max(1, spec.window / 4);
    const int median_idx = static_cast<int>((res.grid.size() - 1) / 2);
    Schedule sch = build_schedule(res.candidate_runs, T, spec.window, every, median_idx,
                                  periods_per_year);
    res.prefix_flagged = sch.prefix_flagged;
    res.stitched = stitch(res.candidate_runs, sch, T);
    res.lambda_seq.reserve(static_cast<size_t>(T));
    for (long t = 0; t < T; ++t)
        res.lambda_seq.push_back(res.grid[static_cast<size_t>(sch.active[static_cast<size_t>(t)])]);
    return res;
}

std::vector<std::pair<int, double>> sharpe_window_sweep(const MarketSeries& market,
                                                        const RunParams& base_params,
                                                        const WalkForwardSpec& spec, int from,
                                                        int to, int step,
                                                        int periods_per_year) {
    if (from < 2 || to < from || step < 1) throw ConfigError("bad window sweep range");
    std::vector<double> grid = spec.grid.empty() ? WalkForwardSpec::default_grid() : spec.grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<Trajectory> runs;
    for (double l : grid) {
        RunParams p = base_params;
        p.lambda = l;
        runs.push_back(run_ensemble(market, p));
    }

    const long T = market.T();
    const int median_idx = static_cast<int>((grid.size() - 1) / 2);
    std::vector<std::pair<int, double>> out;
    for (int w = from; w <= to; w += step) {
        const int every = spec.recalibrate_every > 0 ? spec.recalibrate_every
                                                     : std::max(1, w / 4);
        Schedule sch = build_schedule(runs, T, w, every, median_idx, periods_per_year);
        Trajectory st = stitch(runs, sch, T);
        out.emplace_back(w, sharpe_ratio(simple_returns(st.ret), periods_per_year));
    }
    return out;
}

}  // namespace erep
