#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "erep/commands.hpp"
#include "erep/config.hpp"
#include "erep/errors.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    double lambda = 0.0;
    std::string setting;
    std::string out;
    int window = 0;
    std::string grid;
    CLI::App* cmd = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    a.cmd = cmd;
    cmd->add_option("--config", a.config_path, "Run configuration file (key = value lines)")
        ->required();
    cmd->add_option("--lambda", a.lambda,
                    "Regularization weight override; selects fixed-lambda mode");
    cmd->add_option("--setting", a.setting, "Base-strategy setting: mixed|olmar_only|custom");
    cmd->add_option("--out", a.out, "Output directory override");
    cmd->add_option("--window", a.window,
                    "Calibration window override; selects walk-forward mode");
    cmd->add_option("--grid", a.grid, "Walk-forward lambda grid (comma separated)");
}

erep::RunConfig build_config(const CommonArgs& a) {
    erep::RunConfig cfg = erep::load_config(a.config_path);
    erep::CliOverrides ov;
    if (a.cmd->count("--lambda")) ov.lambda = a.lambda;
    if (a.cmd->count("--setting")) ov.setting = a.setting;
    if (a.cmd->count("--out")) ov.out = a.out;
    if (a.cmd->count("--window")) ov.window = a.window;
    if (a.cmd->count("--grid")) ov.grid = a.grid;
    erep::apply_overrides(cfg, ov);
    erep::finalize_config(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sector-regularized online portfolio ensemble"};
    app.require_subcommand(1);

    CommonArgs bt_args, cp_args, dg_args;
    CLI::App* bt = app.add_subcommand("backtest", "Run the ensemble and write report files");
    add_common(bt, bt_args);
    CLI::App* cp = app.add_subcommand("compare", "Tabulate bases, baselines, and the ensemble");
    add_common(cp, cp_args);
    CLI::App* dg = app.add_subcommand("diagnose", "Regret, curvature, and sensitivity traces");
    add_common(dg, dg_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are configuration errors
    }

    try {
        if (bt->parsed()) return erep::cmd_backtest(build_config(bt_args));
        if (cp->parsed()) return erep::cmd_compare(build_config(cp_args));
        if (dg->parsed()) return erep::cmd_diagnose(build_config(dg_args));
    } catch (const erep::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const erep::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const erep::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
