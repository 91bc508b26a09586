#include "erep/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string_view>

#include "erep/csv.hpp"
#include "erep/errors.hpp"

namespace erep {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool parse_bool(const std::string& key, std::string_view value) {
    std::string v = lower(trim(value));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + std::string(value) +
                      "'");
}

int parse_int(const std::string& key, std::string_view value) {
    std::string_view v = trim(value);
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "': expected an integer, got '" +
                          std::string(value) + "'");
    return out;
}

double parse_num(const std::string& key, std::string_view value) {
    try {
        return parse_double(trim(value), "config key '" + key + "'");
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "data.path") {
        cfg.data_path = value;
    } else if (key == "data.mode") {
        std::string v = lower(value);
        if (v == "relatives")
            cfg.data_mode = PriceMode::relatives;
        else if (v == "raw_prices" || v == "prices")
            cfg.data_mode = PriceMode::raw_prices;
        else
            throw ConfigError("config key 'data.mode': expected relatives|raw_prices, got '" +
                              value + "'");
    } else if (key == "grouping.path") {
        cfg.grouping_path = value;
    } else if (key == "setting") {
        std::string v = lower(value);
        if (v != "mixed" && v != "olmar_only" && v != "custom")
            throw ConfigError("config key 'setting': expected mixed|olmar_only|custom, got '" +
                              value + "'");
        cfg.setting = v;
    } else if (key == "bases") {
        cfg.bases_raw = value;
    } else if (key == "erep.lambda") {
        cfg.lambda = parse_num(key, value);
        cfg.lambda_set = true;
    } else if (key == "erep.mode") {
        std::string v = lower(value);
        if (v != "fixed" && v != "walk_forward")
            throw ConfigError("config key 'erep.mode': expected fixed|walk_forward, got '" +
                              value + "'");
        cfg.erep_mode = v;
    } else if (key == "erep.eta") {
        cfg.eta = parse_num(key, value);
    } else if (key == "erep.epsilon") {
        cfg.epsilon = parse_num(key, value);
    } else if (key == "erep.alpha") {
        cfg.alpha = parse_num(key, value);
    } else if (key == "erep.inner_tol") {
        cfg.inner_tol = parse_num(key, value);
    } else if (key == "erep.inner_max_iter") {
        cfg.inner_max_iter = parse_int(key, value);
    } else if (key == "wf.window") {
        cfg.wf_window = parse_int(key, value);
        cfg.window_set = true;
    } else if (key == "wf.grid") {
        cfg.wf_grid = parse_lambda_grid(value);
    } else if (key == "wf.recalibrate_every") {
        cfg.wf_recalibrate_every = parse_int(key, value);
    } else if (key == "wf.sweep_from") {
        cfg.wf_sweep_from = parse_int(key, value);
    } else if (key == "wf.sweep_to") {
        cfg.wf_sweep_to = parse_int(key, value);
    } else if (key == "wf.sweep_step") {
        cfg.wf_sweep_step = parse_int(key, value);
    } else if (key == "baselines.maons") {
        cfg.run_maons = parse_bool(key, value);
    } else if (key == "baselines.orsad") {
        cfg.run_orsad = parse_bool(key, value);
    } else if (key == "orsad.eta") {
        cfg.orsad_eta = parse_num(key, value);
    } else if (key == "orsad.K") {
        cfg.orsad_K = parse_num(key, value);
    } else if (key == "out.dir") {
        cfg.out_dir = value;
    } else if (key == "sharpe.periods_per_year") {
        cfg.periods_per_year = parse_int(key, value);
    } else if (key == "sharpe.log_returns") {
        cfg.sharpe_log_returns = parse_bool(key, value);
    } else if (key == "determinism") {
        if (!parse_bool(key, value))
            throw ConfigError("config key 'determinism': runs are always deterministic; "
                              "'false' is not supported");
        cfg.deterministic = true;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

}  // namespace

std::vector<double> parse_lambda_grid(const std::string& text) {
    std::vector<double> grid;
    for (const std::string& tok : split(text, ',')) {
        std::string_view t = trim(tok);
        if (t.empty()) continue;
        double v;
        try {
            v = parse_double(t, "lambda grid");
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
        if (v < 0.0) throw ConfigError("lambda grid values must be >= 0");
        grid.push_back(v);
    }
    if (grid.empty()) throw ConfigError("lambda grid is empty");
    return grid;
}

std::vector<StrategySpec> bases_for_setting(const std::string& setting,
                                            const std::string& bases_raw) {
    if (setting == "mixed")
        return {StrategySpec::eg(0.05), StrategySpec::anticor(20), StrategySpec::olmar(20, 10.0)};
    if (setting == "olmar_only")
        return {StrategySpec::olmar(10, 10.0), StrategySpec::olmar(15, 10.0),
                StrategySpec::olmar(20, 10.0)};
    if (setting == "custom") {
        std::vector<StrategySpec> specs;
        for (const std::string& tok : split(bases_raw, ',')) {
            if (trim(tok).empty()) continue;
            specs.push_back(StrategySpec::parse(tok));
        }
        if (specs.empty())
            throw ConfigError("setting 'custom' requires a nonempty 'bases' list");
        return specs;
    }
    throw ConfigError("unknown setting '" + setting + "'");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config file '" + path + "' line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = lower(trim(sv.substr(0, eq)));
        std::string value(trim(sv.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("config file '" + path + "' line " + std::to_string(lineno) +
                              ": empty key");
        assign(cfg, key, value);
    }

    // Relative input paths resolve against the config file's directory so a
    // manifest works no matter where the tool is invoked from; out.dir stays
    // relative to the working directory.
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto anchor = [&base](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative())
            p = (base / p).lexically_normal().string();
    };
    anchor(cfg.data_path);
    anchor(cfg.grouping_path);
    return cfg;
}

void apply_overrides(RunConfig& cfg, const CliOverrides& ov) {
    if (ov.lambda && ov.window)
        throw ConfigError("--lambda and --window conflict: pick fixed-lambda or walk-forward");
    if (ov.setting) {
        std::string v = lower(*ov.setting);
        if (v != "mixed" && v != "olmar_only" && v != "custom")
            throw ConfigError("--setting: expected mixed|olmar_only|custom, got '" + *ov.setting +
                              "'");
        cfg.setting = v;
    }
    if (ov.out) cfg.out_dir = *ov.out;
    if (ov.grid) cfg.wf_grid = parse_lambda_grid(*ov.grid);
    if (ov.lambda) {
        cfg.lambda = *ov.lambda;
        cfg.lambda_set = true;
        cfg.erep_mode = "fixed";
    }
    if (ov.window) {
        cfg.wf_window = *ov.window;
        cfg.window_set = true;
        cfg.erep_mode = "walk_forward";
    }
}

void finalize_config(RunConfig& cfg) {
    cfg.bases = bases_for_setting(cfg.setting, cfg.bases_raw);
    for (const StrategySpec& s : cfg.bases) s.validate();

    if (cfg.lambda < 0.0) throw ConfigError("erep.lambda must be >= 0");
    if (cfg.eta < 0.0) throw ConfigError("erep.eta must be >= 0 (0 selects the theory value)");
    if (cfg.epsilon < 0.0)
        throw ConfigError("erep.epsilon must be >= 0 (0 selects the theory value)");
    if (cfg.alpha <= 0.0) throw ConfigError("erep.alpha must be > 0");
    if (cfg.inner_tol <= 0.0) throw ConfigError("erep.inner_tol must be > 0");
    if (cfg.inner_max_iter < 1) throw ConfigError("erep.inner_max_iter must be >= 1");
    if (cfg.wf_window < 2) throw ConfigError("wf.window must be >= 2");
    if (cfg.wf_recalibrate_every < 0) throw ConfigError("wf.recalibrate_every must be >= 0");
    if (cfg.wf_sweep_from < 2 || cfg.wf_sweep_to < cfg.wf_sweep_from || cfg.wf_sweep_step < 1)
        throw ConfigError("wf.sweep range is invalid");
    if (cfg.orsad_eta < 0.0) throw ConfigError("orsad.eta must be >= 0");
    if (cfg.orsad_K < 0.0) throw ConfigError("orsad.K must be >= 0 (0 selects the default)");
    if (cfg.periods_per_year < 1) throw ConfigError("sharpe.periods_per_year must be >= 1");

    if (cfg.data_path.empty()) throw ConfigError("data.path is required");
    if (cfg.grouping_path.empty()) throw ConfigError("grouping.path is required");
    if (!std::filesystem::exists(cfg.data_path))
        throw ConfigError("data file not found: " + cfg.data_path);
    if (!std::filesystem::exists(cfg.grouping_path))
        throw ConfigError("grouping file not found: " + cfg.grouping_path);
}

ErepMode resolve_mode(const RunConfig& cfg) {
    if (cfg.erep_mode == "fixed") return ErepMode::fixed;
    if (cfg.erep_mode == "walk_forward") return ErepMode::walk_forward;
    if (cfg.lambda_set && cfg.window_set)
        throw ConfigError(
            "both erep.lambda and wf.window are set: choose a mode with erep.mode, --lambda, or "
            "--window");
    if (cfg.window_set) return ErepMode::walk_forward;
    return ErepMode::fixed;
}

}  // namespace erep
