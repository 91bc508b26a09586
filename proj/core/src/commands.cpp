#include "erep/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "erep/baselines.hpp"
#include "erep/csv.hpp"
#include "erep/engine.hpp"
#include "erep/errors.hpp"
#include "erep/evaluation.hpp"
#include "erep/market_data.hpp"

namespace erep {
namespace {

struct Loaded {
    MarketSeries market;
    Grouping sectors;
};

Loaded load_inputs(const RunConfig& cfg) {
    Loaded l;
    l.market = load_prices_csv(cfg.data_path, cfg.data_mode);
    l.sectors = load_grouping(cfg.grouping_path, l.market.names);
    return l;
}

RunParams make_params(const RunConfig& cfg, const Grouping& sectors) {
    RunParams p;
    p.bases = cfg.bases;
    p.sectors = sectors;
    p.lambda = cfg.lambda;
    p.alpha = cfg.alpha;
    p.eta = cfg.eta;
    p.epsilon = cfg.epsilon;
    p.inner_tol = cfg.inner_tol;
    p.inner_max_iter = cfg.inner_max_iter;
    return p;
}

WalkForwardSpec make_wf_spec(const RunConfig& cfg) {
    WalkForwardSpec s;
    s.window = cfg.wf_window;
    s.grid = cfg.wf_grid.empty() ? WalkForwardSpec::default_grid() : cfg.wf_grid;
    s.recalibrate_every = cfg.wf_recalibrate_every;
    return s;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);  // byte-stable newlines everywhere
    if (!f) throw ConfigError("cannot open output file '" + p.string() + "'");
    return f;
}

std::string date_label(const MarketSeries& m, long t) {
    if (static_cast<long>(m.dates.size()) == m.T()) return m.dates[static_cast<size_t>(t)];
    return std::to_string(t + 1);
}

double product(const std::vector<double>& factors) {
    double w = 1.0;
    for (double f : factors) w *= f;
    return w;
}

std::string sharpe_or_nan(const std::vector<double>& factors, const RunConfig& cfg) {
    std::vector<double> rets =
        cfg.sharpe_log_returns ? log_returns(factors) : simple_returns(factors);
    try {
        return format_double(sharpe_ratio(rets, cfg.periods_per_year));
    } catch (const DataError&) {
        return "nan";  // degenerate return series; row stays comparable
    }
}

// Trades one base algorithm standalone over the whole market.
std::vector<double> run_base(const StrategySpec& spec, const MarketSeries& market) {
    Strategy st(spec, market.n());
    std::vector<double> factors;
    factors.reserve(static_cast<size_t>(market.T()));
    for (long t = 0; t < market.T(); ++t) {
        Eigen::VectorXd x = market.relatives.row(t).transpose();
        double r = st.current().weights().dot(x);
        if (!(r > 0.0))
            throw DataError("base strategy produced a nonpositive wealth factor at round " +
                            std::to_string(t + 1));
        factors.push_back(r);
        st.observe(x);
    }
    return factors;
}

void write_report_csv(const std::filesystem::path& path, const Trajectory& traj,
                      const MarketSeries& market) {
    std::ofstream f = open_out(path);
    f << "date,loss,reg_loss,log_wealth";
    for (const std::string& c : traj.column_names) f << ",w_" << c;
    for (const std::string& s : market.names) f << ",b_" << s;
    f << ",max_sector_exposure,lemma2\n";
    for (long t = 0; t < traj.T(); ++t) {
        const size_t ti = static_cast<size_t>(t);
        f << date_label(market, t) << ',' << format_double(traj.loss[ti]) << ','
          << format_double(traj.reg_loss[ti]) << ',' << format_double(traj.log_wealth[ti]);
        for (long i = 0; i < traj.w_seq[ti].size(); ++i)
            f << ',' << format_double(traj.w_seq[ti][i]);
        for (long i = 0; i < traj.b_seq[ti].size(); ++i)
            f << ',' << format_double(traj.b_seq[ti][i]);
        f << ',' << format_double(traj.max_sector_exposure[ti]) << ','
          << format_double(traj.lemma2_term[ti]) << '\n';
    }
}

void write_lambdas_csv(const std::filesystem::path& path, const WalkForwardResult& wf,
                       const MarketSeries& market) {
    std::ofstream f = open_out(path);
    f << "round,date,lambda\n";
    for (size_t t = 0; t < wf.lambda_seq.size(); ++t)
        f << (t + 1) << ',' << date_label(market, static_cast<long>(t)) << ','
          << format_double(wf.lambda_seq[t]) << '\n';
}

std::string joined_base_names(const std::vector<StrategySpec>& bases) {
    std::string out;
    for (size_t i = 0; i < bases.size(); ++i) {
        if (i) out += ',';
        out += bases[i].display_name();
    }
    return out;
}

}  // namespace

int cmd_backtest(const RunConfig& cfg) {
    Loaded in = load_inputs(cfg);
    RunParams params = make_params(cfg, in.sectors);
    ErepMode mode = resolve_mode(cfg);

    Trajectory traj;
    std::optional<WalkForwardResult> wf;
    if (mode == ErepMode::fixed) {
        traj = run_ensemble(in.market, params);
    } else {
        wf = walk_forward_lambda(in.market, params, make_wf_spec(cfg), cfg.periods_per_year);
        traj = wf->stitched;
    }

    std::optional<double> regret_final;
    if (mode == ErepMode::fixed) {
        HindsightSolution hs =
            best_fixed_allocation(traj.P_seq, in.market, traj.lambda, traj.eg);
        regret_final = regret_curve(traj.reg_loss, hs, traj.P_seq, in.market, traj.lambda,
                                    traj.eg)
                           .back();
    }

    std::filesystem::create_directories(cfg.out_dir);
    write_report_csv(std::filesystem::path(cfg.out_dir) / "report.csv", traj, in.market);
    if (wf) write_lambdas_csv(std::filesystem::path(cfg.out_dir) / "lambdas.csv", *wf, in.market);

    double exposure_max = 0.0, exposure_sum = 0.0;
    for (double e : traj.max_sector_exposure) {
        exposure_max = std::max(exposure_max, e);
        exposure_sum += e;
    }

    std::ofstream f = open_out(std::filesystem::path(cfg.out_dir) / "summary.txt");
    std::string text;
    auto kv = [&text](const std::string& k, const std::string& v) {
        text += k;
        text += '=';
        text += v;
        text += '\n';
    };
    kv("command", "backtest");
    kv("setting", cfg.setting);
    kv("bases", joined_base_names(cfg.bases));
    kv("stocks", std::to_string(in.market.n()));
    kv("sectors", std::to_string(in.sectors.m()));
    kv("rounds", std::to_string(traj.T()));
    kv("sub_algorithms", std::to_string(traj.w_seq.empty() ? 0 : traj.w_seq.front().size()));
    kv("mode", mode == ErepMode::fixed ? "fixed" : "walk_forward");
    if (mode == ErepMode::fixed) {
        kv("lambda", format_double(traj.lambda));
    } else {
        kv("lambda_final", format_double(wf->lambda_seq.back()));
        int changes = 0;
        for (size_t t = 1; t < wf->lambda_seq.size(); ++t)
            if (wf->lambda_seq[t] != wf->lambda_seq[t - 1]) ++changes;
        kv("lambda_changes", std::to_string(changes));
        kv("prefix_flagged", wf->prefix_flagged ? "true" : "false");
    }
    kv("eta", format_double(traj.eta));
    kv("epsilon", format_double(traj.epsilon));
    kv("gradient_bound", format_double(traj.G));
    kv("total_return", format_double(std::exp(traj.log_wealth.back())));
    kv("log_wealth", format_double(traj.log_wealth.back()));
    kv("sharpe", sharpe_or_nan(traj.ret, cfg));
    if (regret_final) kv("regret_final", format_double(*regret_final));
    kv("max_sector_exposure_peak", format_double(exposure_max));
    kv("max_sector_exposure_avg",
       format_double(exposure_sum / static_cast<double>(traj.T())));
    kv("solver_warnings", std::to_string(traj.solver_warnings));
    f << text;
    std::cout << text;
    return 0;
}

int cmd_compare(const RunConfig& cfg) {
    Loaded in = load_inputs(cfg);
    RunParams params = make_params(cfg, in.sectors);

    bool want_fixed = true, want_wf = true;
    if (cfg.erep_mode == "fixed")
        want_wf = false;
    else if (cfg.erep_mode == "walk_forward")
        want_fixed = false;
    else if (cfg.lambda_set && !cfg.window_set)
        want_wf = false;
    else if (cfg.window_set && !cfg.lambda_set)
        want_fixed = false;
    // neither (or both) selector set -> the full table with both rows

    std::string text = "algorithm,total_return,sharpe\n";
    auto row = [&](const std::string& name, const std::vector<double>& factors) {
        text += name;
        text += ',';
        text += format_double(product(factors));
        text += ',';
        text += sharpe_or_nan(factors, cfg);
        text += '\n';
    };

    for (const StrategySpec& spec : cfg.bases)
        row(spec.display_name(), run_base(spec, in.market));
    if (cfg.run_maons) row("MAons", maons_run(cfg.bases, in.market, params).ret);
    if (cfg.run_orsad) {
        OrsadParams op;
        op.eta_orsad = cfg.orsad_eta;
        op.K = cfg.orsad_K;
        row("ORSAD", orsad_run(in.market, op, in.sectors).ret);
    }
    if (want_fixed)
        row("EREP(lambda=" + format_double(cfg.lambda) + ")", run_ensemble(in.market, params).ret);
    if (want_wf)
        row("EREP(lambda_wf)",
            walk_forward_lambda(in.market, params, make_wf_spec(cfg), cfg.periods_per_year)
                .stitched.ret);

    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f = open_out(std::filesystem::path(cfg.out_dir) / "compare.csv");
    f << text;
    std::cout << text;
    return 0;
}

int cmd_diagnose(const RunConfig& cfg) {
    Loaded in = load_inputs(cfg);
    RunParams params = make_params(cfg, in.sectors);
    ErepMode mode = resolve_mode(cfg);

    Trajectory traj;
    double lambda_used = cfg.lambda;
    std::optional<WalkForwardResult> wf;
    if (mode == ErepMode::fixed) {
        traj = run_ensemble(in.market, params);
        lambda_used = traj.lambda;
    } else {
        wf = walk_forward_lambda(in.market, params, make_wf_spec(cfg), cfg.periods_per_year);
        traj = wf->stitched;
        lambda_used = wf->lambda_seq.back();  // regret comparator for the stitched play
    }

    // Online regularized losses at the comparator lambda. A fixed run's own
    // reg_loss already is that; the stitched sequence mixes lambdas, so it is
    // re-priced at lambda_used.
    std::vector<double> online;
    if (mode == ErepMode::fixed) {
        online = traj.reg_loss;
    } else {
        online.reserve(static_cast<size_t>(traj.T()));
        for (long t = 0; t < traj.T(); ++t)
            online.push_back(traj.loss[static_cast<size_t>(t)] +
                             lambda_used * group_norm(traj.w_seq[static_cast<size_t>(t)], traj.eg));
    }

    HindsightSolution hs = best_fixed_allocation(traj.P_seq, in.market, lambda_used, traj.eg);
    std::vector<double> curve =
        regret_curve(online, hs, traj.P_seq, in.market, lambda_used, traj.eg);
    Lemma2Report rep = lemma2_report(traj);

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream f = open_out(std::filesystem::path(cfg.out_dir) / "regret.csv");
        f << "round,date,online_reg_loss,cum_regret\n";
        for (long t = 0; t < traj.T(); ++t)
            f << (t + 1) << ',' << date_label(in.market, t) << ','
              << format_double(online[static_cast<size_t>(t)]) << ','
              << format_double(curve[static_cast<size_t>(t)]) << '\n';
    }

    std::string text;
    auto kv = [&text](const std::string& k, const std::string& v) {
        text += k;
        text += '=';
        text += v;
        text += '\n';
    };
    kv("command", "diagnose");
    kv("mode", mode == ErepMode::fixed ? "fixed" : "walk_forward");
    kv("lambda", format_double(lambda_used));
    kv("rounds", std::to_string(traj.T()));
    kv("sub_algorithms", std::to_string(traj.w_seq.empty() ? 0 : traj.w_seq.front().size()));
    kv("eta", format_double(traj.eta));
    kv("epsilon", format_double(traj.epsilon));
    kv("lemma2_statistic", format_double(rep.statistic));
    kv("lemma2_bound", format_double(rep.bound));
    kv("lemma2_satisfied", rep.satisfied ? "true" : "false");
    kv("lemma2_replay_gap", format_double(rep.replay_gap));
    kv("regret_final", format_double(curve.back()));
    kv("hindsight_objective", format_double(hs.objective));
    kv("hindsight_converged", hs.converged ? "true" : "false");
    kv("hindsight_certificate", format_double(hs.certificate));
    kv("hindsight_flat_objective", hs.flat_objective ? "true" : "false");
    {
        std::ofstream f = open_out(std::filesystem::path(cfg.out_dir) / "lemma2.txt");
        f << text;
    }
    std::cout << text;

    if (mode == ErepMode::walk_forward) {
        std::vector<std::pair<int, double>> trace =
            sharpe_window_sweep(in.market, params, make_wf_spec(cfg), cfg.wf_sweep_from,
                                cfg.wf_sweep_to, cfg.wf_sweep_step, cfg.periods_per_year);
        std::ofstream f = open_out(std::filesystem::path(cfg.out_dir) / "sensitivity.csv");
        f << "window,sharpe\n";
        for (const auto& [w, s] : trace) f << w << ',' << format_double(s) << '\n';
    }
    return 0;
}

}  // namespace erep
