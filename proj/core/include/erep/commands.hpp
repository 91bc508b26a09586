#pragma once

#include "erep/config.hpp"

namespace erep {

// Command bodies behind the CLI subcommands. Each loads data per the config,
// runs, and writes its report files under cfg.out_dir; the return value is
// the process exit code (0 on success). Error conditions are reported by
// throwing (ConfigError / DataError / SolverError), which the CLI maps to
// exit codes 2 / 3 / 4.

// Fixed-lambda or walk-forward ensemble run.
// Writes: report.csv (per-round table), summary.txt (key=value metrics),
// lambdas.csv (walk-forward only).
int cmd_backtest(const RunConfig& cfg);

// One row per algorithm: each base, MAons, ORSAD, then the ensemble rows the
// mode selectors ask for (fixed lambda and/or walk-forward; both when
// neither is pinned). Writes compare.csv with columns
// algorithm,total_return,sharpe and echoes it to stdout.
int cmd_compare(const RunConfig& cfg);

// Regret curve (regret.csv), curvature-statistic report (lemma2.txt), and in
// walk-forward mode the Sharpe-vs-window trace (sensitivity.csv).
int cmd_diagnose(const RunConfig& cfg);

}  // namespace erep
