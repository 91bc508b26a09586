#include "erep/engine.hpp"

#include <algorithm>
#include <cmath>

#include "erep/errors.hpp"

namespace erep {

SubAlgorithmGrid build_grid(const std::vector<StrategySpec>& bases, const Grouping& sectors,
                            int n) {
    if (bases.empty()) throw ConfigError("grid needs at least one base strategy");
    if (!sectors.partition)
        throw ConfigError("sector grouping must be a partition (disjoint and covering)");
    if (sectors.dim != n) throw ConfigError("sector grouping does not match stock count");
    for (const auto& b : bases) b.validate();

    SubAlgorithmGrid grid;
    grid.bases = bases;
    grid.sectors = sectors;
    grid.n = n;
    grid.d = static_cast<int>(bases.size());
    grid.k = sectors.m();
    grid.states.reserve(static_cast<size_t>(grid.kd()));
    for (int j = 0; j < grid.k; ++j) {
        int nj = static_cast<int>(sectors.groups[static_cast<size_t>(j)].size());
        for (int i = 0; i < grid.d; ++i) grid.states.emplace_back(bases[static_cast<size_t>(i)], nj);
    }
    return grid;
}

Grouping ensemble_grouping(int d, const Grouping& sectors) {
    if (d < 1) throw ConfigError("ensemble grouping needs d >= 1");
    std::vector<std::vector<int>> groups;
    for (int j = 0; j < sectors.m(); ++j) {
        std::vector<int> g;
        for (int i = 0; i < d; ++i) g.push_back(j * d + i);
        groups.push_back(std::move(g));
    }
    return make_grouping(sectors.names, std::move(groups), d * sectors.m());
}

std::vector<std::string> grid_column_names(const SubAlgorithmGrid& grid) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(grid.kd()));
    for (int j = 0; j < grid.k; ++j)
        for (int i = 0; i < grid.d; ++i)
            names.push_back(grid.bases[static_cast<size_t>(i)].display_name() + "|" +
                            grid.sectors.names[static_cast<size_t>(j)]);
    return names;
}

namespace {

Eigen::MatrixXd embed_columns(const SubAlgorithmGrid& grid) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(grid.n, grid.kd());
    for (int j = 0; j < grid.k; ++j) {
        const auto& sector = grid.sectors.groups[static_cast<size_t>(j)];
        for (int i = 0; i < grid.d; ++i) {
            int c = j * grid.d + i;
            const Eigen::VectorXd& b = grid.states[static_cast<size_t>(c)].current().weights();
            for (size_t s = 0; s < sector.size(); ++s)
                P(sector[s], c) = b[static_cast<long>(s)];
        }
    }
    return P;
}

}  // namespace

Eigen::MatrixXd current_portfolios(const SubAlgorithmGrid& grid) { return embed_columns(grid); }

Eigen::MatrixXd collect_portfolios(SubAlgorithmGrid& grid, const Eigen::VectorXd& x_row) {
    if (x_row.size() != grid.n) throw DataError("market row width does not match grid");
    if (!x_row.allFinite() || x_row.minCoeff() <= 0.0)
        throw DataError("market row must be finite and > 0");
    for (int j = 0; j < grid.k; ++j) {
        const auto& sector = grid.sectors.groups[static_cast<size_t>(j)];
        Eigen::VectorXd slice(static_cast<long>(sector.size()));
        for (size_t s = 0; s < sector.size(); ++s) slice[static_cast<long>(s)] = x_row[sector[s]];
        for (int i = 0; i < grid.d; ++i) {
            int c = j * grid.d + i;
            try {
                grid.states[static_cast<size_t>(c)].observe(slice);
            } catch (const std::exception& e) {
                throw DataError("sub-algorithm (" +
                                grid.bases[static_cast<size_t>(i)].display_name() + ", " +
                                grid.sectors.names[static_cast<size_t>(j)] + "): " + e.what());
            }
        }
    }
    return embed_columns(grid);
}

void validate_portfolio_matrix(const Eigen::MatrixXd& P, const Grouping& sectors, int d) {
    if (P.cols() != static_cast<long>(sectors.m()) * d)
        throw DataError("portfolio matrix has wrong column count");
    for (long c = 0; c < P.cols(); ++c) {
        const auto& sector = sectors.groups[static_cast<size_t>(c / d)];
        double sum = 0.0;
        for (long r = 0; r < P.rows(); ++r) {
            double v = P(r, c);
            if (v < -1e-12) throw DataError("portfolio matrix has a negative entry");
            bool in_sector = std::find(sector.begin(), sector.end(), static_cast<int>(r)) !=
                             sector.end();
            if (!in_sector && v != 0.0)
                throw DataError("portfolio matrix column supported outside its sector");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DataError("portfolio matrix column mass differs from 1");
    }
}

double loss_g(const Eigen::VectorXd& x, const Eigen::MatrixXd& P, const Eigen::VectorXd& w) {
    double inner = x.dot(P * w);
    if (!(inner > 0.0))
        throw DataError("loss: nonpositive wealth factor (data violation)");
    return -std::log(inner);
}

Eigen::VectorXd grad_g(const Eigen::VectorXd& x, const Eigen::MatrixXd& P,
                       const Eigen::VectorXd& w) {
    Eigen::VectorXd ptx = P.transpose() * x;
    double inner = ptx.dot(w);
    if (!(inner > 0.0))
        throw DataError("gradient: nonpositive wealth factor (data violation)");
    return -ptx / inner;
}

Portfolio aggregate_portfolio(const Eigen::MatrixXd& P, const Eigen::VectorXd& w) {
    if (P.cols() != w.size()) throw DataError("aggregate: dimension mismatch");
    return Portfolio(P * w);
}

EnsembleState EnsembleState::initial(int kd, double epsilon) {
    EnsembleState s{Eigen::VectorXd::Constant(kd, 1.0 / kd),
                    CurvatureMatrix::scaled_identity(kd, epsilon), 0, 0.0};
    return s;
}

StepDiagnostics erep_step(EnsembleState& state, const Eigen::VectorXd& x_t,
                          const Eigen::MatrixXd& P_t, const Eigen::MatrixXd& P_next,
                          const CompositeStepParams& params, const Grouping& eg) {
    const long kd = state.w.size();
    if (P_t.cols() != kd || P_next.cols() != kd || P_t.rows() != x_t.size() ||
        P_next.rows() != x_t.size())
        throw DataError("ensemble step: dimension mismatch");

    StepDiagnostics diag;
    Eigen::VectorXd ptx = P_t.transpose() * x_t;
    diag.ret = ptx.dot(state.w);
    if (!(diag.ret > 0.0)) throw DataError("ensemble step: nonpositive wealth factor");
    diag.loss = -std::log(diag.ret);
    diag.reg_loss = diag.loss + params.lambda * group_norm(state.w, eg);
    diag.grad = -ptx / diag.ret;

    state.log_wealth += std::log(diag.ret);
    state.A = update_curvature(state.A, diag.grad);
    diag.lemma2_term = diag.grad.dot(state.A.A.ldlt().solve(diag.grad));

    StepResult step = composite_newton_step(diag.grad, state.A, state.w, params, eg);
    diag.solver_warning = !step.converged;
    state.w = std::move(step.w);
    state.t += 1;
    return diag;
}

std::vector<Eigen::MatrixXd> portfolio_matrix_sequence(const std::vector<StrategySpec>& bases,
                                                       const Grouping& sectors,
                                                       const MarketSeries& market) {
    SubAlgorithmGrid grid = build_grid(bases, sectors, market.n());
    std::vector<Eigen::MatrixXd> seq;
    seq.reserve(static_cast<size_t>(market.T()));
    seq.push_back(current_portfolios(grid));  // uniform columns for round 1
    for (long t = 0; t + 1 < market.T(); ++t)
        seq.push_back(collect_portfolios(grid, market.relatives.row(t).transpose()));
    return seq;
}

double estimate_gradient_bound(const std::vector<Eigen::MatrixXd>& P_seq,
                               const MarketSeries& market) {
    double G = 0.0;
    for (long t = 0; t < market.T(); ++t) {
        Eigen::VectorXd ptx =
            P_seq[static_cast<size_t>(t)].transpose() * market.relatives.row(t).transpose();
        double mn = ptx.minCoeff();
        if (!(mn > 0.0)) throw DataError("gradient bound: degenerate portfolio matrix");
        G = std::max(G, ptx.norm() / mn);
    }
    return G;
}

Trajectory run_ensemble(const MarketSeries& market, const RunParams& params) {
    if (params.lambda < 0.0) throw ConfigError("lambda must be >= 0");
    SubAlgorithmGrid probe = build_grid(params.bases, params.sectors, market.n());
    const int kd = probe.kd();

    Trajectory traj;
    traj.eg = ensemble_grouping(probe.d, params.sectors);
    traj.column_names = grid_column_names(probe);
    traj.lambda = params.lambda;
    traj.P_seq = portfolio_matrix_sequence(params.bases, params.sectors, market);

    traj.G = estimate_gradient_bound(traj.P_seq, market);
    const double D = std::sqrt(2.0);  // Euclidean diameter of the simplex
    TheoryParams theory = theory_eta(params.alpha, traj.G, D);
    traj.eta = params.eta > 0.0 ? params.eta : theory.eta;
    traj.epsilon = params.epsilon > 0.0 ? params.epsilon : theory.epsilon0;

    CompositeStepParams step;
    step.eta = traj.eta;
    step.epsilon = traj.epsilon;
    step.lambda = params.lambda;
    step.inner_tol = params.inner_tol;
    step.inner_max_iter = params.inner_max_iter;
    step.validate();

    EnsembleState state = EnsembleState::initial(kd, step.epsilon);
    const long T = market.T();
    double lemma2_cum = 0.0;
    for (long t = 0; t < T; ++t) {
        const Eigen::MatrixXd& P_t = traj.P_seq[static_cast<size_t>(t)];
        const Eigen::MatrixXd& P_next =
            traj.P_seq[static_cast<size_t>(std::min(t + 1, T - 1))];
        Eigen::VectorXd x_t = market.relatives.row(t).transpose();

        traj.w_seq.push_back(state.w);
        Portfolio b = aggregate_portfolio(P_t, state.w);
        traj.b_seq.push_back(b.weights());
        traj.max_sector_exposure.push_back(group_norm(b.weights(), params.sectors));

        StepDiagnostics diag = erep_step(state, x_t, P_t, P_next, step, traj.eg);
        traj.loss.push_back(diag.loss);
        traj.reg_loss.push_back(diag.reg_loss);
        traj.ret.push_back(diag.ret);
        traj.log_wealth.push_back(state.log_wealth);
        traj.grad_seq.push_back(std::move(diag.grad));
        traj.lemma2_term.push_back(diag.lemma2_term);
        lemma2_cum += diag.lemma2_term;
        traj.lemma2_cum.push_back(lemma2_cum);
        traj.warned.push_back(diag.solver_warning ? 1 : 0);
        if (diag.solver_warning) traj.solver_warnings += 1;
    }
    return traj;
}

}  // namespace erep
