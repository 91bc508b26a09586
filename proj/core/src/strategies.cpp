#include "erep/strategies.hpp"

#include <cctype>
#include <cmath>

#include "erep/csv.hpp"
#include "erep/errors.hpp"
#include "erep/optimizer.hpp"

namespace erep {

Portfolio::Portfolio(Eigen::VectorXd w) : w_(std::move(w)) {
    if (w_.size() < 1) throw DataError("portfolio must have at least one entry");
    if (!w_.allFinite()) throw DataError("portfolio has nonfinite entries");
    for (long i = 0; i < w_.size(); ++i) {
        if (w_[i] < -1e-9)
            throw DataError("portfolio entry " + std::to_string(i) + " is negative: " +
                            format_double(w_[i]));
        if (w_[i] < 0.0) w_[i] = 0.0;
    }
    double sum = w_.sum();
    if (std::abs(sum - 1.0) > 1e-9)
        throw DataError("portfolio mass " + format_double(sum) + " is not 1 within 1e-9");
    w_ /= sum;
}

Portfolio Portfolio::uniform(int n) {
    if (n < 1) throw ConfigError("portfolio size must be >= 1");
    return Portfolio(Eigen::VectorXd::Constant(n, 1.0 / n));
}

StrategySpec StrategySpec::eg(double eta) {
    StrategySpec s;
    s.kind = StrategyKind::EG;
    s.eg_eta = eta;
    s.validate();
    return s;
}

StrategySpec StrategySpec::anticor(int w) {
    StrategySpec s;
    s.kind = StrategyKind::Anticor;
    s.window = w;
    s.validate();
    return s;
}

StrategySpec StrategySpec::olmar(int w, double eps) {
    StrategySpec s;
    s.kind = StrategyKind::OLMAR;
    s.window = w;
    s.olmar_eps = eps;
    s.validate();
    return s;
}

StrategySpec StrategySpec::ucrp() {
    StrategySpec s;
    s.kind = StrategyKind::UniformCRP;
    return s;
}

void StrategySpec::validate() const {
    switch (kind) {
        case StrategyKind::EG:
            if (!(eg_eta > 0.0) || !std::isfinite(eg_eta))
                throw ConfigError("EG learning rate must be > 0");
            break;
        case StrategyKind::Anticor:
            if (window < 2) throw ConfigError("Anticor window must be >= 2");
            break;
        case StrategyKind::OLMAR:
            if (window < 2) throw ConfigError("OLMAR window must be >= 2");
            if (!(olmar_eps > 1.0) || !std::isfinite(olmar_eps))
                throw ConfigError("OLMAR reversion threshold must be > 1");
            break;
        case StrategyKind::UniformCRP:
            break;
    }
}

std::string StrategySpec::display_name() const {
    switch (kind) {
        case StrategyKind::EG:
            return "EG(eta=" + format_double(eg_eta) + ")";
        case StrategyKind::Anticor:
            return "Anticor(w=" + std::to_string(window) + ")";
        case StrategyKind::OLMAR:
            return "OLMAR(w=" + std::to_string(window) + ";eps=" + format_double(olmar_eps) +
                   ")";
        case StrategyKind::UniformCRP:
            return "UCRP";
    }
    throw ConfigError("unknown strategy kind");
}

namespace {

bool ikind(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

}  // namespace

StrategySpec StrategySpec::parse(const std::string& text) {
    std::string_view sv = trim(text);
    std::string kind_tok, args;
    size_t open = sv.find('(');
    if (open == std::string_view::npos) {
        kind_tok = std::string(sv);
    } else {
        if (sv.back() != ')')
            throw ConfigError("bad strategy spec '" + text + "': missing ')'");
        kind_tok = std::string(trim(sv.substr(0, open)));
        args = std::string(sv.substr(open + 1, sv.size() - open - 2));
    }

    StrategySpec s;
    if (ikind(kind_tok, "EG"))
        s.kind = StrategyKind::EG;
    else if (ikind(kind_tok, "Anticor"))
        s.kind = StrategyKind::Anticor;
    else if (ikind(kind_tok, "OLMAR"))
        s.kind = StrategyKind::OLMAR;
    else if (ikind(kind_tok, "UCRP") || ikind(kind_tok, "UniformCRP"))
        s.kind = StrategyKind::UniformCRP;
    else
        throw ConfigError("unknown strategy kind '" + kind_tok + "'");

    for (const std::string& part : split(args, ';')) {
        std::string_view p = trim(part);
        if (p.empty()) continue;
        size_t eq = p.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("bad strategy parameter '" + std::string(p) + "' in '" + text +
                              "'");
        std::string key(trim(p.substr(0, eq)));
        for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        std::string val(trim(p.substr(eq + 1)));
        double num;
        try {
            num = parse_double(val, "strategy spec '" + text + "'");
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
        if (key == "eta" && s.kind == StrategyKind::EG)
            s.eg_eta = num;
        else if (key == "w" &&
                 (s.kind == StrategyKind::Anticor || s.kind == StrategyKind::OLMAR))
            s.window = static_cast<int>(num);
        else if (key == "eps" && s.kind == StrategyKind::OLMAR)
            s.olmar_eps = num;
        else
            throw ConfigError("parameter '" + key + "' not valid for '" + kind_tok + "'");
    }
    s.validate();
    return s;
}

Portfolio eg_update(const Portfolio& b, const Eigen::VectorXd& x, double eta) {
    if (x.size() != b.size()) throw DataError("eg_update: dimension mismatch");
    if (!x.allFinite() || x.minCoeff() <= 0.0)
        throw DataError("eg_update: market row must be finite and > 0");
    double inner = b.weights().dot(x);
    Eigen::ArrayXd expo = (eta * x.array() / inner).exp();
    if (!expo.allFinite()) throw DataError("eg_update: nonfinite exponential");
    Eigen::VectorXd u = b.weights().array() * expo;
    return Portfolio(u / u.sum());
}

Portfolio olmar_step(const Eigen::MatrixXd& price_history, const Portfolio& b, int w,
                     double eps) {
    long rows = price_history.rows();
    if (rows < 1) throw ConfigError("olmar_step: price history is empty");
    if (price_history.cols() != b.size()) throw DataError("olmar_step: dimension mismatch");
    long weff = std::min<long>(w, rows);

    Eigen::VectorXd ma = price_history.bottomRows(weff).colwise().mean();
    Eigen::VectorXd xhat = ma.array() / price_history.row(rows - 1).transpose().array();
    double xbar = xhat.mean();
    Eigen::VectorXd dev = xhat.array() - xbar;
    double den = dev.squaredNorm();
    if (den == 0.0) return b;

    double tau = std::max(0.0, eps - b.weights().dot(xhat)) / den;
    return Portfolio(project_simplex(b.weights() + tau * dev));
}

Portfolio anticor_step(const Eigen::MatrixXd& relative_history, const Portfolio& b, int w) {
    long rows = relative_history.rows();
    int n = b.size();
    if (relative_history.cols() != n) throw DataError("anticor_step: dimension mismatch");
    if (rows < 2L * w) return b;

    Eigen::MatrixXd lx1 = relative_history.block(rows - 2L * w, 0, w, n).array().log();
    Eigen::MatrixXd lx2 = relative_history.block(rows - w, 0, w, n).array().log();
    Eigen::RowVectorXd mu1 = lx1.colwise().mean();
    Eigen::RowVectorXd mu2 = lx2.colwise().mean();
    Eigen::MatrixXd c1 = lx1.rowwise() - mu1;
    Eigen::MatrixXd c2 = lx2.rowwise() - mu2;
    Eigen::VectorXd sd1 = (c1.colwise().squaredNorm() / (w - 1.0)).array().sqrt();
    Eigen::VectorXd sd2 = (c2.colwise().squaredNorm() / (w - 1.0)).array().sqrt();
    Eigen::MatrixXd mcov = c1.transpose() * c2 / (w - 1.0);

    Eigen::MatrixXd mcor = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (sd1[i] > 0.0 && sd2[j] > 0.0) mcor(i, j) = mcov(i, j) / (sd1[i] * sd2[j]);

    // claim(i,j): move wealth from recent winner i to loser j when their
    // cross-window correlation is positive; self anti-correlation adds to it.
    Eigen::MatrixXd claim = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && mu2[i] > mu2[j] && mcor(i, j) > 0.0)
                claim(i, j) = mcor(i, j) + std::max(0.0, -mcor(i, i)) +
                              std::max(0.0, -mcor(j, j));

    Eigen::VectorXd next = b.weights();
    for (int i = 0; i < n; ++i) {
        double total = claim.row(i).sum();
        if (total <= 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (claim(i, j) <= 0.0) continue;
            double amount = b[i] * claim(i, j) / total;
            next[i] -= amount;
            next[j] += amount;
        }
    }
    return Portfolio(std::move(next));
}

Strategy::Strategy(StrategySpec spec, int n)
    : spec_(std::move(spec)), n_(n), current_(Portfolio::uniform(n)) {
    spec_.validate();
    if (spec_.kind == StrategyKind::OLMAR)
        prices_.push_back(Eigen::VectorXd::Ones(n));  // reconstructed base price
}

void Strategy::observe(const Eigen::VectorXd& x_row) {
    if (x_row.size() != n_) throw DataError("strategy observed row of wrong width");
    if (!x_row.allFinite() || x_row.minCoeff() <= 0.0)
        throw DataError("strategy observed nonpositive relative price");

    switch (spec_.kind) {
        case StrategyKind::UniformCRP:
            break;
        case StrategyKind::EG:
            current_ = eg_update(current_, x_row, spec_.eg_eta);
            break;
        case StrategyKind::OLMAR: {
            prices_.push_back((prices_.back().array() * x_row.array()).matrix());
            long rows = std::min<long>(spec_.window, static_cast<long>(prices_.size()));
            Eigen::MatrixXd window(rows, n_);
            for (long r = 0; r < rows; ++r)
                window.row(r) = prices_[prices_.size() - rows + r];
            current_ = olmar_step(window, current_, spec_.window, spec_.olmar_eps);
            break;
        }
        case StrategyKind::Anticor: {
            relatives_.push_back(x_row);
            long need = 2L * spec_.window;
            if (static_cast<long>(relatives_.size()) >= need) {
                Eigen::MatrixXd window(need, n_);
                for (long r = 0; r < need; ++r)
                    window.row(r) = relatives_[relatives_.size() - need + r];
                current_ = anticor_step(window, current_, spec_.window);
            }
            break;
        }
    }
}

}  // namespace erep
