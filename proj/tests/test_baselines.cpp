#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "erep/baselines.hpp"
#include "erep/engine.hpp"
#include "erep/errors.hpp"
#include "test_support.hpp"

using namespace erep;

TEST_CASE("project_capped_simplex reduces to the plain simplex projection at K=1") {
    testsup::Rng rng(71);
    Grouping g = testsup::contiguous_sectors(6, 3);
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd v(6);
        for (int i = 0; i < 6; ++i) v[i] = rng.range(-1.0, 2.0);
        Eigen::VectorXd capped = project_capped_simplex(v, g, 1.0);
        Eigen::VectorXd plain = project_simplex(v);
        CHECK((capped - plain).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("project_capped_simplex output is feasible and idempotent") {
    testsup::Rng rng(73);
    Grouping g = testsup::contiguous_sectors(6, 2);
    const double K = 0.7;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd v(6);
        for (int i = 0; i < 6; ++i) v[i] = rng.range(-1.0, 2.0);
        Eigen::VectorXd b = project_capped_simplex(v, g, K);
        CHECK(std::abs(b.sum() - 1.0) <= 1e-9);
        CHECK(b.minCoeff() >= -1e-9);
        for (const std::vector<int>& grp : g.groups) {
            double s = 0.0;
            for (int i : grp) s += b[i];
            CHECK(s <= K + 1e-9);
        }
        Eigen::VectorXd again = project_capped_simplex(b, g, K);
        CHECK((again - b).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
}

TEST_CASE("project_capped_simplex matches a grid search in dimension three") {
    testsup::Rng rng(79);
    Grouping g = make_grouping({"L", "R"}, {{0, 1}, {2}}, 3);
    const double K = 0.8;
    for (int it = 0; it < 20; ++it) {
        Eigen::VectorXd v(3);
        for (int i = 0; i < 3; ++i) v[i] = rng.range(-0.5, 1.5);
        Eigen::VectorXd b = project_capped_simplex(v, g, K);
        double fb = 0.5 * (b - v).squaredNorm();

        // dense sweep over the capped simplex
        double best = std::numeric_limits<double>::infinity();
        const double step = 1e-3;
        for (double p0 = 0.0; p0 <= 1.0 + 1e-12; p0 += step) {
            for (double p1 = 0.0; p0 + p1 <= 1.0 + 1e-12; p1 += step) {
                double p2 = 1.0 - p0 - p1;
                if (p2 < -1e-12) continue;
                if (p0 + p1 > K + 1e-12 || p2 > K + 1e-12) continue;
                Eigen::Vector3d cand(p0, p1, std::max(p2, 0.0));
                best = std::min(best, 0.5 * (cand - v).squaredNorm());
            }
        }
        CHECK(fb <= best + 1e-5);
    }
}

TEST_CASE("project_capped_simplex rejects infeasible caps") {
    Grouping g = testsup::contiguous_sectors(4, 2);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.25);
    CHECK_THROWS_AS(project_capped_simplex(v, g, 0.4), SolverError);  // 2 * 0.4 < 1
}

TEST_CASE("OrsadParams validation") {
    OrsadParams p;
    p.K = 0.3;
    CHECK_THROWS_AS(p.validate(2), ConfigError);  // K < 1/m infeasible
    p.K = 0.75;
    p.eta_orsad = -1.0;
    CHECK_THROWS_AS(p.validate(2), ConfigError);
    p.eta_orsad = 0.2;
    CHECK_NOTHROW(p.validate(2));
}

TEST_CASE("orsad_step has an interior fixed point on a flat market") {
    Grouping g = testsup::contiguous_sectors(4, 2);
    OrsadParams p;
    p.eta_orsad = 0.3;
    p.K = 0.8;
    Portfolio b = Portfolio::uniform(4);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
    OrsadStepResult r = orsad_step(b, x, p, g);
    CHECK(r.converged);
    // gradient of -log<b,x> at x = 1 is the constant vector -1: the step keeps b uniform
    CHECK((r.b.weights() - b.weights()).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("orsad_step respects the sector cap on skewed data") {
    Grouping g = testsup::contiguous_sectors(4, 2);
    OrsadParams p;
    p.eta_orsad = 5.0;  // aggressive step toward the winning sector
    p.K = 0.6;
    Portfolio b = Portfolio::uniform(4);
    Eigen::VectorXd x(4);
    x << 1.4, 1.4, 0.7, 0.7;
    for (int t = 0; t < 10; ++t) {
        OrsadStepResult r = orsad_step(b, x, p, g);
        b = r.b;
        double s0 = b.weights()[0] + b.weights()[1];
        CHECK(s0 <= 0.6 + 1e-9);
    }
    // pressure should drive the first sector to its cap
    CHECK(b.weights()[0] + b.weights()[1] == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("orsad_run on a flat market keeps wealth at one and derives defaults") {
    MarketSeries m;
    m.names = {"A", "B", "C", "D"};
    m.relatives = Eigen::MatrixXd::Ones(25, 4);
    Grouping g = testsup::contiguous_sectors(4, 2);

    OrsadParams p;  // eta 0, K 0 -> both derived
    OrsadRun run = orsad_run(m, p, g);
    CHECK(run.K_used == 0.5 * (0.5 + 1.0));
    CHECK(run.eta_used > 0.0);
    CHECK(std::abs(run.log_wealth.back()) <= 1e-12);
    for (const Eigen::VectorXd& b : run.b_seq) {
        CHECK(std::abs(b.sum() - 1.0) <= 1e-9);
        for (const std::vector<int>& grp : g.groups) {
            double s = 0.0;
            for (int i : grp) s += b[i];
            CHECK(s <= run.K_used + 1e-9);
        }
    }
}

TEST_CASE("maons_run is byte-identical to a single-sector unregularized ensemble") {
    testsup::Rng rng(83);
    MarketSeries m = testsup::synth_market(rng, 5, 40);
    std::vector<StrategySpec> bases = {StrategySpec::eg(0.05), StrategySpec::olmar(10, 10.0)};

    RunParams rp;
    rp.bases = bases;
    std::vector<int> all(5);
    for (int i = 0; i < 5; ++i) all[i] = i;
    rp.sectors = make_grouping({"All"}, {all}, 5);
    rp.lambda = 0.0;
    Trajectory direct = run_ensemble(m, rp);

    Trajectory via = maons_run(bases, m, rp);
    REQUIRE(via.T() == direct.T());
    for (long t = 0; t < via.T(); ++t) {
        const size_t ti = static_cast<size_t>(t);
        CHECK(via.log_wealth[ti] == direct.log_wealth[ti]);
        CHECK((via.w_seq[ti] - direct.w_seq[ti]).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((via.b_seq[ti] - direct.b_seq[ti]).lpNorm<Eigen::Infinity>() == 0.0);
    }
    CHECK(via.lambda == 0.0);
}
