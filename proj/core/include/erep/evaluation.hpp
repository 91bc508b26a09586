#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "erep/engine.hpp"
#include "erep/market_data.hpp"
#include "erep/strategies.hpp"

namespace erep {

// Wealth after trading the whole series starting from 1 (product of daily
// factors <b_t, x_t>).
double cumulative_wealth(const std::vector<Eigen::VectorXd>& portfolios,
                         const MarketSeries& market);

// Annualized Sharpe with zero risk-free rate:
// mean(returns) / sample_std(returns) * sqrt(periods_per_year).
double sharpe_ratio(const std::vector<double>& returns, int periods_per_year);

// Simple daily returns <b,x> - 1 from a trajectory's wealth factors; the log
// variant exists for sensitivity checks.
std::vector<double> simple_returns(const std::vector<double>& wealth_factors);
std::vector<double> log_returns(const std::vector<double>& wealth_factors);

struct HindsightSolution {
    Eigen::VectorXd w_star;   // fixed allocation on the simplex
    double objective = 0;     // sum_t g_t(w*) + T * lambda * L(w*)
    double certificate = 0;   // gap estimate: last improvement / fixed-point residual
    bool converged = false;
    bool flat_objective = false;  // objective constant in w (degenerate data)
    int iterations = 0;
};

// Offline minimizer of sum_t -log<x_t, P_t w> + T * lambda * L(w) over the
// simplex. The smooth part has a bounded-curvature gradient on the simplex
// (<x,Pw> >= min_j (P'x)_j > 0), so this runs accelerated proximal gradient
// with backtracking; the prox of the lifted group-norm term reuses the exact
// QP kernel. Stops on the spec'd stall rule (< 1e-9 improvement over 200
// iterations) or the prox fixed point.
HindsightSolution best_fixed_allocation(const std::vector<Eigen::MatrixXd>& P_seq,
                                        const MarketSeries& market, double lambda,
                                        const Grouping& eg);

// Cumulative sums of (online regularized loss - per-round hindsight
// regularized loss); the final entry is the empirical regret.
std::vector<double> regret_curve(const std::vector<double>& online_reg_losses,
                                 const HindsightSolution& hindsight,
                                 const std::vector<Eigen::MatrixXd>& P_seq,
                                 const MarketSeries& market, double lambda,
                                 const Grouping& eg);

struct Lemma2Report {
    double statistic = 0;      // sum_t ||grad_t||^2 w.r.t. updated A_t inverse
    double bound = 0;          // kd * log T
    bool satisfied = false;
    double replay_gap = 0;     // |statistic - engine accumulation|
};

// Recomputes the statistic from the logged gradients (fresh curvature
// accumulation) and cross-checks the engine's own per-round accounting.
Lemma2Report lemma2_report(const Trajectory& traj);

struct WalkForwardSpec {
    int window = 0;
    std::vector<double> grid;   // candidate lambdas; sorted ascending on use
    int recalibrate_every = 0;  // 0 -> max(1, window / 4)

    static std::vector<double> default_grid();
};

struct WalkForwardResult {
    std::vector<double> lambda_seq;  // lambda in force at each round
    Trajectory stitched;             // per-round values from the active run
    std::vector<Trajectory> candidate_runs;  // one per grid lambda (sorted)
    std::vector<double> grid;                // sorted grid
    bool prefix_flagged = false;  // window exceeded the data length
};

// At every recalibration point the trailing-window Sharpe of each
// candidate-lambda run decides the lambda used until the next one (ties ->
// smaller lambda; grid median before the first full window). Candidate runs
// start from round 1 and do not depend on the recalibration schedule, so one
// run per grid value is computed and the result is stitched from them.
WalkForwardResult walk_forward_lambda(const MarketSeries& market, const RunParams& base_params,
                                      const WalkForwardSpec& spec, int periods_per_year);

// Overall Sharpe of the stitched walk-forward trajectory for each window in
// [from, to] step `step`; returns (window, sharpe) pairs. Candidate runs are
// shared across windows.
std::vector<std::pair<int, double>> sharpe_window_sweep(const MarketSeries& market,
                                                        const RunParams& base_params,
                                                        const WalkForwardSpec& spec, int from,
                                                        int to, int step,
                                                        int periods_per_year);

}  // namespace erep
