#pragma once

#include <optional>
#include <string>
#include <vector>

#include "erep/market_data.hpp"
#include "erep/strategies.hpp"

namespace erep {

enum class ErepMode { fixed, walk_forward };

// Full run description shared by the CLI commands. Values come from a
// key=value config file with optional command-line overrides layered on top;
// finalize() resolves the base-strategy setting and checks referenced files.
struct RunConfig {
    // data
    std::string data_path;
    PriceMode data_mode = PriceMode::relatives;
    std::string grouping_path;

    // base strategies
    std::string setting = "mixed";  // mixed | olmar_only | custom
    std::string bases_raw;          // comma list, used when setting == custom
    std::vector<StrategySpec> bases;

    // ensemble parameters
    double lambda = 0.1;
    bool lambda_set = false;  // loss-mode selectors: tracked to enforce
    bool window_set = false;  // "exactly one of fixed / walk-forward"
    std::string erep_mode;    // "", "fixed", "walk_forward"
    double eta = 0.0;         // 0 -> theory value
    double epsilon = 0.0;     // 0 -> theory value
    double alpha = 1.0;
    double inner_tol = 1e-8;
    int inner_max_iter = 20000;

    // walk-forward calibration
    int wf_window = 60;
    std::vector<double> wf_grid;  // empty -> default grid
    int wf_recalibrate_every = 0;
    int wf_sweep_from = 10;
    int wf_sweep_to = 300;
    int wf_sweep_step = 10;

    // baselines
    bool run_maons = true;
    bool run_orsad = true;
    double orsad_eta = 0.0;  // 0 -> theory value
    double orsad_K = 0.0;    // 0 -> feasible-range midpoint

    // output / reporting
    std::string out_dir = "out";
    int periods_per_year = 252;
    bool sharpe_log_returns = false;  // sensitivity check: Sharpe on log returns
    bool deterministic = true;        // seedless determinism; cannot be disabled
};

struct CliOverrides {
    std::optional<double> lambda;
    std::optional<std::string> setting;
    std::optional<std::string> out;
    std::optional<int> window;
    std::optional<std::string> grid;  // comma list of lambdas
};

// Parses `key = value` lines ('#' lines are comments; later keys overwrite
// earlier ones). Unknown keys, malformed values, and out-of-range parameters
// throw ConfigError naming the offender.
RunConfig load_config(const std::string& path);

// Command-line flags win over file values. Passing both --lambda and
// --window is rejected (the two select conflicting modes).
void apply_overrides(RunConfig& cfg, const CliOverrides& ov);

// Resolves the setting into concrete base specs, validates parameter ranges,
// and checks that the referenced data/grouping files exist.
void finalize_config(RunConfig& cfg);

// Mode selection for commands that run a single ensemble variant. An explicit
// erep.mode wins; otherwise the lambda/window selectors must not conflict.
ErepMode resolve_mode(const RunConfig& cfg);

std::vector<StrategySpec> bases_for_setting(const std::string& setting,
                                            const std::string& bases_raw);

std::vector<double> parse_lambda_grid(const std::string& text);

}  // namespace erep
