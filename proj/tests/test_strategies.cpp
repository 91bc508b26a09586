#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "erep/errors.hpp"
#include "erep/strategies.hpp"
#include "test_support.hpp"

using namespace erep;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("Portfolio validates and renormalizes") {
    Portfolio p(vec2(0.5, 0.5));
    CHECK(p.weights().sum() == 1.0);
    CHECK_THROWS_AS(Portfolio(vec2(0.7, 0.7)), DataError);       // sum too large
    CHECK_THROWS_AS(Portfolio(vec2(1.2, -0.2)), DataError);      // negative entry
    Portfolio clamped(vec2(1.0 + 4e-10, -4e-10));                // within tolerance
    CHECK(clamped[1] == 0.0);
    CHECK(clamped.weights().sum() == 1.0);
    Portfolio u = Portfolio::uniform(4);
    CHECK(u[2] == 0.25);
}

TEST_CASE("eg_update matches the hand-computed value") {
    Portfolio b(vec2(0.5, 0.5));
    Portfolio next = eg_update(b, vec2(2.0, 1.0), 0.05);
    CHECK(next[0] == doctest::Approx(0.5083325618141192).epsilon(1e-12));
    CHECK(next[1] == doctest::Approx(0.4916674381858806).epsilon(1e-12));
    CHECK(next.weights().sum() == 1.0);

    CHECK_THROWS_AS(eg_update(b, vec2(1.0, 0.0), 0.05), DataError);   // nonpositive price
    CHECK_THROWS_AS(eg_update(b, vec2(1.0, -1.0), 0.05), DataError);
}

TEST_CASE("eg_update with equal relatives keeps the portfolio") {
    Portfolio b(vec3(0.2, 0.3, 0.5));
    Portfolio next = eg_update(b, vec3(1.0, 1.0, 1.0), 0.05);
    for (int i = 0; i < 3; ++i) CHECK(next[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("olmar_step matches the step-by-step oracle") {
    Eigen::MatrixXd prices(3, 2);
    prices << 1.0, 1.0, 1.1, 0.9, 1.21, 0.81;
    Portfolio b(vec2(0.5, 0.5));

    Portfolio mild = olmar_step(prices, b, 3, 1.05);
    CHECK(mild[0] == doctest::Approx(0.32071070234113663).epsilon(1e-10));
    CHECK(mild[1] == doctest::Approx(0.6792892976588634).epsilon(1e-10));

    Portfolio aggressive = olmar_step(prices, b, 3, 10.0);
    CHECK(aggressive[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(aggressive[1] == doctest::Approx(1.0).epsilon(1e-12));

    // warm-up: a window larger than the history uses all available rows
    Portfolio warm = olmar_step(prices, b, 5, 1.05);
    CHECK(warm[0] == doctest::Approx(mild[0]).epsilon(1e-14));
    CHECK(warm[1] == doctest::Approx(mild[1]).epsilon(1e-14));
}

TEST_CASE("olmar_step leaves b unchanged when the predicted deviation is zero") {
    Eigen::MatrixXd prices(3, 2);
    prices << 1.0, 1.0, 1.0, 1.0, 1.0, 1.0;
    Portfolio b(vec2(0.3, 0.7));
    Portfolio next = olmar_step(prices, b, 3, 10.0);
    CHECK(next[0] == b[0]);
    CHECK(next[1] == b[1]);
}

TEST_CASE("anticor_step matches the published-rule oracle") {
    Eigen::MatrixXd rel(8, 3);
    rel << 0.98, 0.999, 1.012,
           0.967, 0.972, 0.981,
           1.02, 1.023, 1.006,
           1.009, 0.988, 0.977,
           1.01, 1.015, 0.998,
           0.961, 1.005, 1.002,
           0.985, 1.016, 1.029,
           1.017, 1.003, 0.988;
    Portfolio b(vec3(0.2, 0.5, 0.3));

    Portfolio next = anticor_step(rel, b, 4);
    CHECK(next[0] == doctest::Approx(0.632998106547414).epsilon(1e-10));
    CHECK(next[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(next[2] == doctest::Approx(0.367001893452586).epsilon(1e-10));

    // fewer than 2w rows: no trade
    Portfolio same = anticor_step(rel.topRows(7), b, 4);
    for (int i = 0; i < 3; ++i) CHECK(same[i] == b[i]);
}

TEST_CASE("anticor_step is a no-trade on zero-variance windows") {
    Eigen::MatrixXd rel = Eigen::MatrixXd::Ones(8, 3);
    Portfolio b(vec3(0.2, 0.5, 0.3));
    Portfolio next = anticor_step(rel, b, 4);
    for (int i = 0; i < 3; ++i) CHECK(next[i] == b[i]);
}

TEST_CASE("StrategySpec validation and canonical names") {
    CHECK(StrategySpec::eg(0.05).display_name() == "EG(eta=0.05)");
    CHECK(StrategySpec::anticor(20).display_name() == "Anticor(w=20)");
    CHECK(StrategySpec::olmar(20, 10.0).display_name() == "OLMAR(w=20;eps=10)");
    CHECK(StrategySpec::ucrp().display_name() == "UCRP");

    CHECK_THROWS_AS(StrategySpec::anticor(1).validate(), ConfigError);
    CHECK_THROWS_AS(StrategySpec::olmar(1, 10.0).validate(), ConfigError);
    CHECK_THROWS_AS(StrategySpec::olmar(10, 1.0).validate(), ConfigError);  // eps must be > 1
    CHECK_THROWS_AS(StrategySpec::eg(0.0).validate(), ConfigError);
    CHECK_NOTHROW(StrategySpec::anticor(2).validate());
}

TEST_CASE("StrategySpec::parse round-trips display names") {
    for (const StrategySpec& s :
         {StrategySpec::eg(0.1), StrategySpec::anticor(15), StrategySpec::olmar(10, 5.0),
          StrategySpec::ucrp()}) {
        StrategySpec back = StrategySpec::parse(s.display_name());
        CHECK(back.display_name() == s.display_name());
    }
    CHECK(StrategySpec::parse("olmar(W=20; EPS=10)").display_name() == "OLMAR(w=20;eps=10)");
    CHECK(StrategySpec::parse("  ucrp ").display_name() == "UCRP");
    CHECK_THROWS_AS(StrategySpec::parse("Frob(w=3)"), ConfigError);
    CHECK_THROWS_AS(StrategySpec::parse("EG(rate=0.1)"), ConfigError);
    CHECK_THROWS_AS(StrategySpec::parse("Anticor(w=x)"), ConfigError);
}

TEST_CASE("Strategy state machine: EG chains eg_update") {
    testsup::Rng rng(7);
    Strategy st(StrategySpec::eg(0.05), 3);
    Portfolio manual = Portfolio::uniform(3);
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i) x[i] = rng.range(0.9, 1.1);
        st.observe(x);
        manual = eg_update(manual, x, 0.05);
        for (int i = 0; i < 3; ++i) CHECK(st.current()[i] == manual[i]);
    }
}

TEST_CASE("Strategy state machine: OLMAR reconstructs prices from relatives") {
    // relatives (1.1, 0.9) then (1.1, 0.9): prices 1 -> 1.1 -> 1.21 (stock 1)
    Strategy st(StrategySpec::olmar(3, 1.05), 2);
    st.observe(vec2(1.1, 0.9));
    st.observe(vec2(1.1, 0.9));
    // price history is exactly the oracle's 3-row matrix now
    Eigen::MatrixXd prices(3, 2);
    prices << 1.0, 1.0, 1.1, 0.9, 1.21, 0.81;
    // replay: the state machine applied olmar_step after each observation
    Portfolio manual = Portfolio::uniform(2);
    manual = olmar_step(prices.topRows(2), manual, 3, 1.05);
    manual = olmar_step(prices, manual, 3, 1.05);
    CHECK(st.current()[0] == doctest::Approx(manual[0]).epsilon(1e-14));
    CHECK(st.current()[1] == doctest::Approx(manual[1]).epsilon(1e-14));
}

TEST_CASE("Strategy state machine: Anticor waits for 2w rows, UCRP never moves") {
    testsup::Rng rng(11);
    Strategy anti(StrategySpec::anticor(3), 3);
    Strategy ucrp(StrategySpec::ucrp(), 3);
    for (int t = 0; t < 5; ++t) {  // fewer than 2w = 6 observations
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i) x[i] = rng.range(0.9, 1.1);
        anti.observe(x);
        ucrp.observe(x);
    }
    for (int i = 0; i < 3; ++i) {
        CHECK(anti.current()[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));
        CHECK(ucrp.current()[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    Eigen::VectorXd x6 = vec3(1.05, 0.95, 1.0);
    anti.observe(x6);  // 6th row arrives: the first Anticor trade may happen
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += anti.current()[i];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}
