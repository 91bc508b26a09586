#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "erep/market_data.hpp"
#include "erep/optimizer.hpp"
#include "erep/strategies.hpp"

namespace erep {

// d base strategies, each cloned once per sector, trading only that sector's
// stocks. Sub-algorithms are stored sector-major: index j*d + i runs base i
// on sector j, so each sector occupies a contiguous block of d coordinates
// in the allocation space.
struct SubAlgorithmGrid {
    std::vector<StrategySpec> bases;  // d
    Grouping sectors;                 // partition of {0..n-1} into k groups
    std::vector<Strategy> states;     // k*d
    int n = 0, d = 0, k = 0;

    int kd() const { return k * d; }
};

SubAlgorithmGrid build_grid(const std::vector<StrategySpec>& bases, const Grouping& sectors,
                            int n);

// Partition of the k*d allocation coordinates into k sector blocks (named
// after the sectors); this is the grouping the regularizer runs on.
Grouping ensemble_grouping(int d, const Grouping& sectors);

// Column labels "base|sector" in allocation order.
std::vector<std::string> grid_column_names(const SubAlgorithmGrid& grid);

// n x kd matrix whose columns are the sub-algorithms' current portfolios
// embedded into n dimensions (zeros off-sector). Before any observation this
// is uniform over each sector.
Eigen::MatrixXd current_portfolios(const SubAlgorithmGrid& grid);

// Feeds each sub-algorithm its sector slice of the market row and returns
// the matrix of revised portfolios (the matrix to trade the NEXT round).
Eigen::MatrixXd collect_portfolios(SubAlgorithmGrid& grid, const Eigen::VectorXd& x_row);

void validate_portfolio_matrix(const Eigen::MatrixXd& P, const Grouping& sectors, int d);

// g(w) = -log<x, Pw> and its gradient -P'x / <x, Pw>.
double loss_g(const Eigen::VectorXd& x, const Eigen::MatrixXd& P, const Eigen::VectorXd& w);
Eigen::VectorXd grad_g(const Eigen::VectorXd& x, const Eigen::MatrixXd& P,
                       const Eigen::VectorXd& w);

Portfolio aggregate_portfolio(const Eigen::MatrixXd& P, const Eigen::VectorXd& w);

struct EnsembleState {
    Eigen::VectorXd w;   // allocation over sub-algorithms, on the simplex
    CurvatureMatrix A;   // order k*d
    long t = 0;          // rounds completed
    double log_wealth = 0.0;

    static EnsembleState initial(int kd, double epsilon);
};

struct StepDiagnostics {
    double loss = 0;          // -log<x, Pw> for the traded round
    double reg_loss = 0;      // loss + lambda * L(w_t)
    double ret = 0;           // <x, Pw>, the day's wealth factor
    Eigen::VectorXd grad;     // round gradient
    double lemma2_term = 0;   // grad' A_t^{-1} grad with the updated A_t
    bool solver_warning = false;
};

// One round of the online Newton update: trade with (P_t, w_t), accumulate
// wealth, push the gradient outer product into A, and move w by the
// composite step. P_next is the matrix the caller will trade next round; it
// is validated for shape only (the update itself uses round-t data).
StepDiagnostics erep_step(EnsembleState& state, const Eigen::VectorXd& x_t,
                          const Eigen::MatrixXd& P_t, const Eigen::MatrixXd& P_next,
                          const CompositeStepParams& params, const Grouping& eg);

struct RunParams {
    std::vector<StrategySpec> bases;
    Grouping sectors;
    double lambda = 0.0;
    double alpha = 1.0;       // exp-concavity constant for the theory defaults
    double eta = 0.0;         // 0 -> derive from theory_eta with dataset G
    double epsilon = 0.0;     // 0 -> derive
    double inner_tol = 1e-8;
    int inner_max_iter = 20000;
};

// Full per-round record of a run; everything downstream (reports, regret,
// walk-forward stitching, replay checks) reads from here.
struct Trajectory {
    std::vector<double> loss, reg_loss, ret, log_wealth;
    std::vector<double> lemma2_term, lemma2_cum, max_sector_exposure;
    std::vector<char> warned;             // per-round solver warning flag
    std::vector<Eigen::VectorXd> w_seq;   // w_t used for round t
    std::vector<Eigen::VectorXd> b_seq;   // aggregate stock portfolio at round t
    std::vector<Eigen::VectorXd> grad_seq;
    std::vector<Eigen::MatrixXd> P_seq;   // matrix traded at round t
    Grouping eg;                          // grouping over allocation coordinates
    std::vector<std::string> column_names;
    double eta = 0, epsilon = 0, G = 0, lambda = 0;
    int solver_warnings = 0;
    long T() const { return static_cast<long>(loss.size()); }
};

// Precompute the portfolio-matrix sequence (it does not depend on w):
// P_1 uniform, P_{t+1} collected after observing row t.
std::vector<Eigen::MatrixXd> portfolio_matrix_sequence(const std::vector<StrategySpec>& bases,
                                                       const Grouping& sectors,
                                                       const MarketSeries& market);

// Gradient-norm bound sup_w ||grad g|| <= max_t ||P_t'x_t|| / min_j (P_t'x_t)_j,
// valid because <x, Pw> >= min_j (P'x)_j on the simplex.
double estimate_gradient_bound(const std::vector<Eigen::MatrixXd>& P_seq,
                               const MarketSeries& market);

Trajectory run_ensemble(const MarketSeries& market, const RunParams& params);

}  // namespace erep
