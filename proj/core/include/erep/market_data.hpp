#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace erep {

// T x n matrix of relative prices: row t, column i holds day-t close divided
// by day-(t-1) close for stock i. Strictly positive everywhere (a zero would
// make the log-loss unbounded, so it is rejected at load time).
struct MarketSeries {
    std::vector<std::string> names;  // n stock identifiers
    Eigen::MatrixXd relatives;       // T x n, finite, > 0
    std::vector<std::string> dates;  // empty, or one label per row

    int n() const { return static_cast<int>(relatives.cols()); }
    long T() const { return static_cast<long>(relatives.rows()); }
};

// Named index sets over {0..dim-1}. Groups may overlap (the group norm allows
// it); `partition` is true iff they are pairwise disjoint and cover all
// coordinates, which sectorization requires.
struct Grouping {
    std::vector<std::string> names;        // m group names
    std::vector<std::vector<int>> groups;  // m nonempty, sorted index lists
    int dim = 0;                           // number of coordinates covered
    bool partition = false;

    int m() const { return static_cast<int>(groups.size()); }
};

enum class PriceMode { raw_prices, relatives };

// Validates (nonempty groups, indices in range, full coverage), sorts each
// group, computes the partition flag.
Grouping make_grouping(std::vector<std::string> names,
                       std::vector<std::vector<int>> groups, int dim);

// CSV: header of ticker names (optionally a leading "date" column), one row
// per day. raw_prices mode converts T price rows into T-1 relative rows.
MarketSeries load_prices_csv(const std::string& path, PriceMode mode);

// Serializes with shortest round-trip formatting: save + load is bit-exact.
void write_relatives_csv(const MarketSeries& series, const std::string& path);

// Lines of "GroupName: t1,t2,..."; '#' starts a comment. Every ticker must
// resolve against `names`, every stock must be covered.
Grouping load_grouping(const std::string& path, const std::vector<std::string>& names);

void write_grouping(const Grouping& grouping, const std::vector<std::string>& names,
                    const std::string& path);

}  // namespace erep
