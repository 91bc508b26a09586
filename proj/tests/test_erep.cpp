#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "erep/engine.hpp"
#include "erep/errors.hpp"
#include "test_support.hpp"

using namespace erep;

namespace {

std::vector<StrategySpec> mixed_bases() {
    return {StrategySpec::eg(0.05), StrategySpec::anticor(20), StrategySpec::olmar(20, 10.0)};
}

RunParams params_for(const Grouping& sectors, double lambda,
                     std::vector<StrategySpec> bases = mixed_bases()) {
    RunParams p;
    p.bases = std::move(bases);
    p.sectors = sectors;
    p.lambda = lambda;
    return p;
}

}  // namespace

TEST_CASE("build_grid lays sub-algorithms out sector-major") {
    Grouping sectors = testsup::contiguous_sectors(8, 4);
    SubAlgorithmGrid grid = build_grid(mixed_bases(), sectors, 8);
    CHECK(grid.kd() == 12);
    CHECK(grid.d == 3);
    CHECK(grid.k == 4);
    std::vector<std::string> names = grid_column_names(grid);
    REQUIRE(names.size() == 12);
    CHECK(names[0] == "EG(eta=0.05)|G0");
    CHECK(names[1] == "Anticor(w=20)|G0");
    CHECK(names[3] == "EG(eta=0.05)|G1");
    CHECK(names[11] == "OLMAR(w=20;eps=10)|G3");

    Grouping overlap = make_grouping({"A", "B"}, {{0, 1}, {1, 2}}, 3);
    CHECK_THROWS_AS(build_grid(mixed_bases(), overlap, 3), ConfigError);  // not a partition
}

TEST_CASE("ensemble_grouping blocks are contiguous and named after sectors") {
    Grouping sectors = testsup::contiguous_sectors(8, 4);
    Grouping eg = ensemble_grouping(3, sectors);
    CHECK(eg.dim == 12);
    CHECK(eg.partition);
    CHECK(eg.names == sectors.names);
    CHECK(eg.groups[0] == std::vector<int>{0, 1, 2});
    CHECK(eg.groups[3] == std::vector<int>{9, 10, 11});
}

TEST_CASE("current_portfolios starts uniform within each sector") {
    Grouping sectors = testsup::contiguous_sectors(6, 3);
    SubAlgorithmGrid grid = build_grid(mixed_bases(), sectors, 6);
    Eigen::MatrixXd P = current_portfolios(grid);
    REQUIRE(P.rows() == 6);
    REQUIRE(P.cols() == 9);
    // column 0: EG on sector 0 = stocks {0,1} -> 0.5 each, zero elsewhere
    CHECK(P(0, 0) == 0.5);
    CHECK(P(1, 0) == 0.5);
    CHECK(P(2, 0) == 0.0);
    for (int c = 0; c < 9; ++c) CHECK(P.col(c).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(validate_portfolio_matrix(P, sectors, 3));
}

TEST_CASE("loss_g and grad_g agree with finite differences") {
    testsup::Rng rng(37);
    for (int it = 0; it < 10; ++it) {
        int n = 5, p = 6;
        Eigen::MatrixXd P(n, p);
        for (int c = 0; c < p; ++c) P.col(c) = testsup::random_simplex(rng, n);
        Eigen::VectorXd w = testsup::random_simplex(rng, p);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.range(0.9, 1.1);

        Eigen::VectorXd g = grad_g(x, P, w);
        const double h = 1e-6;
        for (int j = 0; j < p; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
            e[j] = h;
            double fd = (loss_g(x, P, w + e) - loss_g(x, P, w - e)) / (2.0 * h);
            CHECK(std::abs(g[j] - fd) <= 1e-6);
        }
    }
}

TEST_CASE("loss_g rejects nonpositive inner products") {
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd w(2), x(2);
    w << 1.0, 0.0;
    x << 0.0, 1.0;
    CHECK_THROWS_AS(loss_g(x, P, w), DataError);
}

TEST_CASE("erep_step updates state exactly as documented") {
    testsup::Rng rng(41);
    const int kd = 6;
    Grouping sectors = testsup::contiguous_sectors(6, 3);
    Grouping eg = ensemble_grouping(2, sectors);
    Eigen::MatrixXd P(6, kd);
    for (int c = 0; c < kd; ++c) P.col(c) = testsup::random_simplex(rng, 6);
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.range(0.95, 1.05);

    const double eps = 5.0;
    EnsembleState st = EnsembleState::initial(kd, eps);
    CHECK((st.w - Eigen::VectorXd::Constant(kd, 1.0 / kd)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((st.A.A - eps * Eigen::MatrixXd::Identity(kd, kd)).lpNorm<Eigen::Infinity>() == 0.0);

    CompositeStepParams prm;
    prm.eta = 0.1;
    prm.lambda = 0.1;
    prm.epsilon = eps;
    Eigen::VectorXd w_before = st.w;
    Eigen::MatrixXd A_before = st.A.A;
    StepDiagnostics d = erep_step(st, x, P, P, prm, eg);

    Eigen::VectorXd g = grad_g(x, P, w_before);
    CHECK(std::abs(d.loss + std::log(x.dot(P * w_before))) <= 1e-12);
    CHECK(std::abs(d.reg_loss - (d.loss + prm.lambda * group_norm(w_before, eg))) <= 1e-12);
    CHECK((st.A.A - (A_before + g * g.transpose())).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(st.t == 1);
    CHECK(st.log_wealth == std::log(d.ret));
    // lemma2 term uses the updated curvature
    Eigen::VectorXd solved = st.A.A.ldlt().solve(g);
    CHECK(std::abs(d.lemma2_term - g.dot(solved)) <= 1e-12);
    CHECK(std::abs(st.w.sum() - 1.0) <= 1e-9);
    CHECK(st.w.minCoeff() >= -1e-12);
}

TEST_CASE("run_ensemble produces a coherent trajectory") {
    testsup::Rng rng(43);
    MarketSeries m = testsup::synth_market(rng, 8, 60);
    Grouping sectors = testsup::contiguous_sectors(8, 4);
    Trajectory traj = run_ensemble(m, params_for(sectors, 0.1));

    REQUIRE(traj.T() == 60);
    CHECK(traj.column_names.size() == 12);
    CHECK((traj.w_seq.front() - Eigen::VectorXd::Constant(12, 1.0 / 12))
              .lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(traj.lambda == 0.1);
    CHECK(traj.solver_warnings == 0);

    // wealth identity and the loss/log-wealth mirror
    double cum = 0.0;
    for (long t = 0; t < traj.T(); ++t) {
        const size_t ti = static_cast<size_t>(t);
        CHECK(std::abs(traj.loss[ti] + std::log(traj.ret[ti])) <= 1e-12);
        cum += std::log(traj.ret[ti]);
        CHECK(std::abs(traj.log_wealth[ti] - cum) <= 1e-12);
        // per-round simplex invariants
        CHECK(std::abs(traj.w_seq[ti].sum() - 1.0) <= 1e-9);
        CHECK(traj.w_seq[ti].minCoeff() >= -1e-9);
        CHECK(std::abs(traj.b_seq[ti].sum() - 1.0) <= 1e-9);
        CHECK(traj.b_seq[ti].minCoeff() >= -1e-9);
        // aggregate portfolio really is P w
        Eigen::VectorXd b = traj.P_seq[ti] * traj.w_seq[ti];
        CHECK((b - traj.b_seq[ti]).lpNorm<Eigen::Infinity>() <= 1e-12);
        // exposure trace is the sector group norm of b
        CHECK(traj.max_sector_exposure[ti] ==
              doctest::Approx(group_norm(traj.b_seq[ti], sectors)).epsilon(1e-12));
    }

    // gradient bound: every recorded gradient obeys the dataset G
    std::vector<Eigen::MatrixXd> P_seq = portfolio_matrix_sequence(mixed_bases(), sectors, m);
    CHECK(traj.G == doctest::Approx(estimate_gradient_bound(P_seq, m)).epsilon(1e-12));
    for (const Eigen::VectorXd& g : traj.grad_seq) CHECK(g.norm() <= traj.G + 1e-9);

    // theory defaults were applied
    TheoryParams tp = theory_eta(1.0, traj.G, std::sqrt(2.0));
    CHECK(traj.eta == tp.eta);
    CHECK(traj.epsilon == tp.epsilon0);
}

TEST_CASE("portfolio matrix sequence is lambda-independent and shared") {
    testsup::Rng rng(47);
    MarketSeries m = testsup::synth_market(rng, 6, 30);
    Grouping sectors = testsup::contiguous_sectors(6, 3);
    Trajectory a = run_ensemble(m, params_for(sectors, 0.0));
    Trajectory b = run_ensemble(m, params_for(sectors, 1.0));
    REQUIRE(a.P_seq.size() == b.P_seq.size());
    for (size_t t = 0; t < a.P_seq.size(); ++t)
        CHECK((a.P_seq[t] - b.P_seq[t]).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("heavier regularization cannot raise average sector exposure") {
    testsup::Rng rng(53);
    MarketSeries m = testsup::synth_market(rng, 8, 80, 0.95, 1.06);
    Grouping sectors = testsup::contiguous_sectors(8, 4);
    auto avg_exposure = [&](double lambda) {
        Trajectory t = run_ensemble(m, params_for(sectors, lambda));
        double s = 0.0;
        for (double e : t.max_sector_exposure) s += e;
        return s / static_cast<double>(t.T());
    };
    double none = avg_exposure(0.0);
    double heavy = avg_exposure(5.0);
    CHECK(heavy <= none + 1e-9);
    CHECK(heavy >= 0.25 - 1e-9);  // partition floor: 1/k
}

TEST_CASE("eta and epsilon overrides are honored") {
    testsup::Rng rng(59);
    MarketSeries m = testsup::synth_market(rng, 4, 20);
    Grouping sectors = testsup::contiguous_sectors(4, 2);
    RunParams p = params_for(sectors, 0.1);
    p.eta = 0.037;
    p.epsilon = 12.5;
    Trajectory traj = run_ensemble(m, p);
    CHECK(traj.eta == 0.037);
    CHECK(traj.epsilon == 12.5);
}

TEST_CASE("run_ensemble validates inputs") {
    testsup::Rng rng(61);
    MarketSeries m = testsup::synth_market(rng, 6, 10);
    Grouping overlap = make_grouping({"A", "B"}, {{0, 1, 2, 3}, {3, 4, 5}}, 6);
    CHECK_THROWS_AS(run_ensemble(m, params_for(overlap, 0.1)), ConfigError);

    RunParams bad = params_for(testsup::contiguous_sectors(6, 3), 0.1);
    bad.bases.clear();
    CHECK_THROWS_AS(run_ensemble(m, bad), ConfigError);

    RunParams neg = params_for(testsup::contiguous_sectors(6, 3), -0.5);
    CHECK_THROWS_AS(run_ensemble(m, neg), ConfigError);
}
