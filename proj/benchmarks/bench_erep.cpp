#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "erep/baselines.hpp"
#include "erep/engine.hpp"
#include "erep/evaluation.hpp"
#include "erep/optimizer.hpp"
#include "erep/strategies.hpp"

namespace {

// Small deterministic generator so benchmark inputs are identical across
// platforms and runs (the library itself has no randomness).
struct Rng {
    uint64_t s = 0x9e3779b97f4a7c15ull;
    double uniform() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s >> 11) * 0x1.0p-53;
    }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

erep::MarketSeries synth_market(int n, long T) {
    Rng rng;
    erep::MarketSeries m;
    for (int i = 0; i < n; ++i) m.names.push_back("S" + std::to_string(i));
    m.relatives.resize(T, n);
    for (long t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) m.relatives(t, i) = rng.range(0.98, 1.02);
    return m;
}

erep::Grouping contiguous_sectors(int n, int k) {
    std::vector<std::string> names;
    std::vector<std::vector<int>> groups(k);
    for (int j = 0; j < k; ++j) names.push_back("G" + std::to_string(j));
    for (int i = 0; i < n; ++i) groups[static_cast<size_t>(i % k)].push_back(i);
    return erep::make_grouping(names, groups, n);
}

erep::RunParams mixed_params(const erep::Grouping& sectors, double lambda) {
    erep::RunParams p;
    p.bases = {erep::StrategySpec::eg(0.05), erep::StrategySpec::anticor(20),
               erep::StrategySpec::olmar(20, 10.0)};
    p.sectors = sectors;
    p.lambda = lambda;
    return p;
}

void BM_project_simplex(benchmark::State& state) {
    Rng rng;
    const long n = state.range(0);
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) v[i] = rng.range(-1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(erep::project_simplex(v));
}
BENCHMARK(BM_project_simplex)->Arg(8)->Arg(32)->Arg(128);

void BM_composite_step(benchmark::State& state) {
    Rng rng;
    const int p = static_cast<int>(state.range(0));
    Eigen::MatrixXd M(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) M(i, j) = rng.range(-1.0, 1.0);
    erep::CurvatureMatrix A{Eigen::MatrixXd::Identity(p, p) + M * M.transpose()};
    Eigen::VectorXd grad(p);
    for (int i = 0; i < p; ++i) grad[i] = rng.range(-2.0, 2.0);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(p, 1.0 / p);
    erep::Grouping eg = contiguous_sectors(p, 4);
    erep::CompositeStepParams params;
    params.eta = 0.5;
    params.lambda = 0.1;
    params.epsilon = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(erep::composite_newton_step(grad, A, w, params, eg));
}
BENCHMARK(BM_composite_step)->Arg(8)->Arg(12)->Arg(24);

void BM_anticor_step(benchmark::State& state) {
    erep::MarketSeries m = synth_market(25, 40);
    erep::Portfolio b = erep::Portfolio::uniform(25);
    for (auto _ : state) benchmark::DoNotOptimize(erep::anticor_step(m.relatives, b, 20));
}
BENCHMARK(BM_anticor_step);

void BM_erep_round(benchmark::State& state) {
    erep::MarketSeries m = synth_market(12, 64);
    erep::Grouping sectors = contiguous_sectors(12, 4);
    erep::RunParams p = mixed_params(sectors, 0.1);
    std::vector<Eigen::MatrixXd> P_seq = erep::portfolio_matrix_sequence(p.bases, sectors, m);
    double G = erep::estimate_gradient_bound(P_seq, m);
    erep::TheoryParams tp = erep::theory_eta(1.0, G, std::sqrt(2.0));
    erep::CompositeStepParams cp;
    cp.eta = tp.eta;
    cp.lambda = 0.1;
    cp.epsilon = tp.epsilon0;
    erep::Grouping eg = erep::ensemble_grouping(static_cast<int>(p.bases.size()), sectors);
    for (auto _ : state) {
        erep::EnsembleState st = erep::EnsembleState::initial(eg.dim, tp.epsilon0);
        benchmark::DoNotOptimize(
            erep::erep_step(st, m.relatives.row(0).transpose(), P_seq[0], P_seq[1], cp, eg));
    }
}
BENCHMARK(BM_erep_round);

void BM_backtest_year(benchmark::State& state) {
    erep::MarketSeries m = synth_market(25, 252);
    erep::Grouping sectors = contiguous_sectors(25, 4);
    erep::RunParams p = mixed_params(sectors, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(erep::run_ensemble(m, p));
}
BENCHMARK(BM_backtest_year)->Unit(benchmark::kMillisecond);

void BM_hindsight(benchmark::State& state) {
    erep::MarketSeries m = synth_market(12, 250);
    erep::Grouping sectors = contiguous_sectors(12, 4);
    erep::RunParams p = mixed_params(sectors, 0.1);
    erep::Trajectory traj = erep::run_ensemble(m, p);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            erep::best_fixed_allocation(traj.P_seq, m, 0.1, traj.eg));
}
BENCHMARK(BM_hindsight)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
