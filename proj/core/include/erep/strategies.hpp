#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace erep {

// Wealth-fraction vector on the probability simplex. Construction validates
// (entries >= 0, sum within 1e-9 of 1) and then renormalizes so downstream
// code can rely on an exact sum of 1.
class Portfolio {
  public:
    explicit Portfolio(Eigen::VectorXd w);
    static Portfolio uniform(int n);

    const Eigen::VectorXd& weights() const { return w_; }
    int size() const { return static_cast<int>(w_.size()); }
    double operator[](int i) const { return w_[i]; }

  private:
    Eigen::VectorXd w_;
};

enum class StrategyKind { EG, Anticor, OLMAR, UniformCRP };

struct StrategySpec {
    StrategyKind kind = StrategyKind::UniformCRP;
    double eg_eta = 0.05;    // EG
    int window = 20;         // Anticor / OLMAR
    double olmar_eps = 10.0; // OLMAR

    static StrategySpec eg(double eta);
    static StrategySpec anticor(int w);
    static StrategySpec olmar(int w, double eps);
    static StrategySpec ucrp();

    void validate() const;  // windows >= 2, eg_eta > 0, olmar_eps > 1
    // Canonical text form, e.g. "EG(eta=0.05)", "OLMAR(w=20;eps=10)".
    // No commas, so the name can sit inside CSV cells and config lists.
    std::string display_name() const;
    static StrategySpec parse(const std::string& text);
};

// --- pure per-step kernels ---

// Multiplicative update b'_i proportional to b_i * exp(eta * x_i / <b,x>).
Portfolio eg_update(const Portfolio& b, const Eigen::VectorXd& x, double eta);

// Moving-average reversion. `price_history` rows are raw prices, oldest
// first, last row = current prices; prediction uses the most recent
// min(w, rows) rows (all available rows while warming up). If the predicted
// relatives are uniform the portfolio is returned unchanged.
Portfolio olmar_step(const Eigen::MatrixXd& price_history, const Portfolio& b, int w,
                     double eps);

// Cross-correlation mean-reversion over two adjacent w-day windows of log
// relatives. Needs 2w history rows; fewer -> b returned unchanged. Wealth
// moves from recent winners to losers in proportion to positive
// cross-correlation claims; zero-variance stocks produce no claims.
Portfolio anticor_step(const Eigen::MatrixXd& relative_history, const Portfolio& b, int w);

// Online state machine: holds the portfolio to trade next round and the
// history each kind needs. observe(x) appends the day's relatives and
// advances the portfolio per the strategy rule (strategies that lack history
// keep their previous portfolio, initially uniform).
class Strategy {
  public:
    Strategy(StrategySpec spec, int n);

    const Portfolio& current() const { return current_; }
    void observe(const Eigen::VectorXd& x_row);

    const StrategySpec& spec() const { return spec_; }
    int n() const { return n_; }

  private:
    StrategySpec spec_;
    int n_;
    Portfolio current_;
    std::vector<Eigen::VectorXd> relatives_;  // Anticor window source
    std::vector<Eigen::VectorXd> prices_;     // OLMAR: reconstructed, p_0 = 1
};

}  // namespace erep
