#pragma once

#include <Eigen/Dense>

#include "erep/engine.hpp"
#include "erep/market_data.hpp"
#include "erep/strategies.hpp"

namespace erep {

struct OrsadParams {
    double eta_orsad = 0.0;  // 0 -> derive from the dataset gradient bound
    double K = 0.0;          // 0 -> midpoint of [1/m, 1]

    // For an m-group partition the simplex admits group norm down to 1/m,
    // so K below that leaves the feasible set empty.
    void validate(int m) const;
};

// One mirror-descent round: argmin over {b on simplex, L(b) <= K} of
//   -eta * log<b, x> + 1/2 ||b - b_prev||^2.
// Solved by projected gradient with exact projection onto the intersection
// (a small QP), which is linearly convergent here since the proximal term
// makes the objective 1-strongly convex.
struct OrsadStepResult {
    Portfolio b;
    bool converged = false;
    int iterations = 0;
};
OrsadStepResult orsad_step(const Portfolio& b_prev, const Eigen::VectorXd& x_t,
                           const OrsadParams& params, const Grouping& stock_grouping);

// Exact projection onto {simplex, group mass <= K per group}; exposed for
// tests and for seeding the first feasible portfolio.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, const Grouping& grouping,
                                       double K);

struct OrsadRun {
    std::vector<Eigen::VectorXd> b_seq;
    std::vector<double> ret;
    std::vector<double> log_wealth;
    double eta_used = 0, K_used = 0;
    int solver_warnings = 0;
};
OrsadRun orsad_run(const MarketSeries& market, const OrsadParams& params,
                   const Grouping& stock_grouping);

// The unregularized Newton ensemble over whole-market base algorithms:
// exactly the ensemble engine with a single all-stocks sector and lambda = 0
// (same code path, so the reduction identity is bitwise).
Trajectory maons_run(const std::vector<StrategySpec>& bases, const MarketSeries& market,
                     const RunParams& params);

}  // namespace erep
