#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <string>

#include "erep/csv.hpp"
#include "erep/errors.hpp"
#include "erep/market_data.hpp"
#include "test_support.hpp"

using namespace erep;

namespace {

std::string write_file(const testsup::TempDir& dir, const std::string& name,
                       const std::string& content) {
    std::filesystem::path p = dir.path() / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p.string();
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, -0.0, 1e-300, 1e300, 0.5083325618141192,
                     12345678901234567.0, 2.2250738585072014e-308}) {
        std::string s = format_double(v);
        CHECK(parse_double(s, "t") == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
}

TEST_CASE("parse_double rejects partial and malformed tokens") {
    CHECK_THROWS_AS(parse_double("1.2x", "ctx"), DataError);
    CHECK_THROWS_AS(parse_double("", "ctx"), DataError);
    CHECK_THROWS_AS(parse_double("--3", "ctx"), DataError);
    CHECK(parse_double("-1e-3", "ctx") == -1e-3);
}

TEST_CASE("relatives CSV loads with and without a date column") {
    testsup::TempDir dir("md");
    std::string with_dates =
        write_file(dir, "a.csv", "Date,AA,BB\n2020-01-02,1.01,0.99\n2020-01-03,1,1.02\n");
    MarketSeries m = load_prices_csv(with_dates, PriceMode::relatives);
    CHECK(m.n() == 2);
    CHECK(m.T() == 2);
    CHECK(m.names == std::vector<std::string>{"AA", "BB"});
    CHECK(m.dates == std::vector<std::string>{"2020-01-02", "2020-01-03"});
    CHECK(m.relatives(0, 0) == 1.01);
    CHECK(m.relatives(1, 1) == 1.02);

    std::string bare = write_file(dir, "b.csv", "AA,BB\n1.01,0.99\n");
    MarketSeries mb = load_prices_csv(bare, PriceMode::relatives);
    CHECK(mb.dates.empty());
    CHECK(mb.T() == 1);
}

TEST_CASE("raw price mode emits T-1 ratio rows and drops the first label") {
    testsup::TempDir dir("md");
    std::string p =
        write_file(dir, "raw.csv", "date,AA,BB\nd0,100,50\nd1,110,45\nd2,99,54\n");
    MarketSeries m = load_prices_csv(p, PriceMode::raw_prices);
    CHECK(m.T() == 2);
    CHECK(m.dates == std::vector<std::string>{"d1", "d2"});
    CHECK(m.relatives(0, 0) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(m.relatives(0, 1) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(m.relatives(1, 0) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(m.relatives(1, 1) == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("loader rejects bad numbers with row/column context") {
    testsup::TempDir dir("md");
    CHECK_THROWS_AS(
        load_prices_csv(write_file(dir, "neg.csv", "AA,BB\n1.0,-0.5\n"), PriceMode::relatives),
        DataError);
    CHECK_THROWS_AS(
        load_prices_csv(write_file(dir, "zero.csv", "AA,BB\n0,1\n"), PriceMode::relatives),
        DataError);
    CHECK_THROWS_AS(
        load_prices_csv(write_file(dir, "text.csv", "AA,BB\n1.0,abc\n"), PriceMode::relatives),
        DataError);
    CHECK_THROWS_AS(
        load_prices_csv(write_file(dir, "ragged.csv", "AA,BB\n1.0\n"), PriceMode::relatives),
        DataError);
    CHECK_THROWS_AS(
        load_prices_csv(write_file(dir, "empty.csv", ""), PriceMode::relatives), DataError);
    try {
        load_prices_csv(write_file(dir, "neg2.csv", "AA,BB\n1.0,1.0\n1.0,-2\n"),
                        PriceMode::relatives);
        CHECK(false);
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("BB") != std::string::npos);  // column named
    }
    // an unopenable path is a configuration problem (bad path), not bad data
    CHECK_THROWS_AS(load_prices_csv((dir.path() / "missing.csv").string(), PriceMode::relatives),
                    ConfigError);
    // raw mode needs at least two price rows to form one relative
    CHECK_THROWS_AS(
        load_prices_csv(write_file(dir, "short.csv", "AA\n100\n"), PriceMode::raw_prices),
        DataError);
}

TEST_CASE("write_relatives_csv round-trips bit-exactly") {
    testsup::Rng rng(41);
    erep::MarketSeries m = testsup::synth_market(rng, 5, 37);
    m.dates.clear();
    for (long t = 0; t < m.T(); ++t) m.dates.push_back("d" + std::to_string(t));
    testsup::TempDir dir("md");
    std::string p = (dir.path() / "rt.csv").string();
    write_relatives_csv(m, p);
    MarketSeries back = load_prices_csv(p, PriceMode::relatives);
    REQUIRE(back.T() == m.T());
    REQUIRE(back.n() == m.n());
    CHECK(back.names == m.names);
    CHECK(back.dates == m.dates);
    for (long t = 0; t < m.T(); ++t)
        for (int i = 0; i < m.n(); ++i) CHECK(back.relatives(t, i) == m.relatives(t, i));
}

TEST_CASE("make_grouping validates and computes the partition flag") {
    Grouping g = make_grouping({"A", "B"}, {{1, 0}, {2}}, 3);
    CHECK(g.partition);
    CHECK(g.groups[0] == std::vector<int>{0, 1});  // sorted
    CHECK(g.m() == 2);

    Grouping overlap = make_grouping({"A", "B"}, {{0, 1}, {1, 2}}, 3);
    CHECK_FALSE(overlap.partition);

    CHECK_THROWS_AS(make_grouping({"A"}, {{0}}, 2), ConfigError);           // uncovered
    CHECK_THROWS_AS(make_grouping({"A"}, {{0, 0}}, 1), ConfigError);        // duplicate index
    CHECK_THROWS_AS(make_grouping({"A"}, {{}}, 1), ConfigError);            // empty group
    CHECK_THROWS_AS(make_grouping({"A"}, {{1}}, 1), ConfigError);           // out of range
    CHECK_THROWS_AS(make_grouping({"A,B"}, {{0}}, 1), ConfigError);         // comma in name
    CHECK_THROWS_AS(make_grouping({"A", "B"}, {{0}}, 1), ConfigError);      // size mismatch
}

TEST_CASE("grouping file parsing") {
    testsup::TempDir dir("md");
    std::vector<std::string> names{"AA", "BB", "CC"};

    std::string good = write_file(dir, "g.txt",
                                  "# comment\nTech: BB,AA\n\nRest: CC\n");
    Grouping g = load_grouping(good, names);
    CHECK(g.names == std::vector<std::string>{"Tech", "Rest"});
    CHECK(g.groups[0] == std::vector<int>{0, 1});
    CHECK(g.partition);

    try {
        load_grouping(write_file(dir, "unk.txt", "Tech: AA,ZZ\n"), names);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("ZZ") != std::string::npos);
    }
    CHECK_THROWS_AS(load_grouping(write_file(dir, "dup.txt", "T: AA\nT: BB,CC\n"), names),
                    ConfigError);
    CHECK_THROWS_AS(load_grouping(write_file(dir, "emptyg.txt", "T:\nU: AA,BB,CC\n"), names),
                    ConfigError);
    try {
        load_grouping(write_file(dir, "uncov.txt", "T: AA,BB\n"), names);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("CC") != std::string::npos);
    }
    CHECK_THROWS_AS(load_grouping((dir.path() / "nope.txt").string(), names), ConfigError);

    // round trip
    std::string out = (dir.path() / "gw.txt").string();
    write_grouping(g, names, out);
    Grouping back = load_grouping(out, names);
    CHECK(back.names == g.names);
    CHECK(back.groups == g.groups);
}
