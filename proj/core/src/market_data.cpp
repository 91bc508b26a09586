#include "erep/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "erep/csv.hpp"
#include "erep/errors.hpp"

namespace erep {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    return in;
}

}  // namespace

Grouping make_grouping(std::vector<std::string> names,
                       std::vector<std::vector<int>> groups, int dim) {
    if (dim < 1) throw ConfigError("grouping dimension must be >= 1");
    if (groups.empty()) throw ConfigError("grouping needs at least one group");
    if (names.size() != groups.size())
        throw ConfigError("grouping: names/groups size mismatch");

    std::vector<int> cover(dim, 0);
    for (size_t j = 0; j < groups.size(); ++j) {
        auto& g = groups[j];
        if (names[j].find(',') != std::string::npos)
            throw ConfigError("group name '" + names[j] + "' may not contain a comma");
        if (g.empty()) throw ConfigError("group '" + names[j] + "' is empty");
        std::sort(g.begin(), g.end());
        if (std::adjacent_find(g.begin(), g.end()) != g.end())
            throw ConfigError("group '" + names[j] + "' lists an index twice");
        for (int idx : g) {
            if (idx < 0 || idx >= dim)
                throw ConfigError("group '" + names[j] + "' index out of range");
            ++cover[idx];
        }
    }
    for (int i = 0; i < dim; ++i)
        if (cover[i] == 0)
            throw ConfigError("coordinate " + std::to_string(i) + " is covered by no group");

    Grouping out;
    out.names = std::move(names);
    out.groups = std::move(groups);
    out.dim = dim;
    out.partition = std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; });
    return out;
}

MarketSeries load_prices_csv(const std::string& path, PriceMode mode) {
    std::ifstream in = open_or_throw(path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty price file: " + path);
    std::vector<std::string> header = split(trim(line), ',');
    bool has_dates = !header.empty() && iequals(trim(header.front()), "date");

    MarketSeries series;
    size_t first_col = has_dates ? 1 : 0;
    for (size_t c = first_col; c < header.size(); ++c) {
        std::string name(trim(header[c]));
        if (name.empty()) throw DataError(path + ": empty column name in header");
        series.names.push_back(std::move(name));
    }
    if (series.names.empty()) throw DataError(path + ": header has no stock columns");
    const size_t n = series.names.size();

    std::vector<Eigen::VectorXd> rows;
    std::vector<std::string> dates;
    long row_no = 0;
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        ++row_no;
        std::vector<std::string> cells = split(sv, ',');
        if (cells.size() != n + first_col)
            throw DataError(path + ": row " + std::to_string(row_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(n + first_col));
        if (has_dates) dates.emplace_back(trim(cells[0]));
        Eigen::VectorXd row(n);
        for (size_t c = 0; c < n; ++c) {
            std::string context = path + ": row " + std::to_string(row_no) + ", column " +
                                  series.names[c];
            row[c] = parse_double(cells[c + first_col], context);
            if (!std::isfinite(row[c]) || row[c] <= 0.0)
                throw DataError(context + ": value must be finite and > 0, got " +
                                format_double(row[c]));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    if (mode == PriceMode::raw_prices) {
        if (rows.size() < 2)
            throw DataError(path + ": raw price mode needs at least 2 price rows");
        series.relatives.resize(static_cast<long>(rows.size()) - 1, static_cast<long>(n));
        for (size_t t = 1; t < rows.size(); ++t)
            series.relatives.row(static_cast<long>(t) - 1) =
                (rows[t].array() / rows[t - 1].array()).matrix();
        if (has_dates) dates.erase(dates.begin());  // relative t labeled by day t close
    } else {
        series.relatives.resize(static_cast<long>(rows.size()), static_cast<long>(n));
        for (size_t t = 0; t < rows.size(); ++t)
            series.relatives.row(static_cast<long>(t)) = rows[t];
    }
    series.dates = std::move(dates);
    return series;
}

void write_relatives_csv(const MarketSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    bool has_dates = !series.dates.empty();
    if (has_dates) out << "date";
    for (size_t c = 0; c < series.names.size(); ++c) {
        if (c > 0 || has_dates) out << ',';
        out << series.names[c];
    }
    out << '\n';
    for (long t = 0; t < series.T(); ++t) {
        if (has_dates) out << series.dates[static_cast<size_t>(t)];
        for (int c = 0; c < series.n(); ++c) {
            if (c > 0 || has_dates) out << ',';
            out << format_double(series.relatives(t, c));
        }
        out << '\n';
    }
}

Grouping load_grouping(const std::string& path, const std::vector<std::string>& names) {
    std::ifstream in = open_or_throw(path);

    std::vector<std::string> group_names;
    std::vector<std::vector<int>> groups;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        size_t colon = sv.find(':');
        if (colon == std::string_view::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'GroupName: t1,t2,...'");
        std::string gname(trim(sv.substr(0, colon)));
        if (gname.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty group name");
        if (std::find(group_names.begin(), group_names.end(), gname) != group_names.end())
            throw ConfigError(path + ": duplicate group '" + gname + "'");

        std::vector<int> idx;
        for (const std::string& tok : split(sv.substr(colon + 1), ',')) {
            std::string ticker(trim(tok));
            if (ticker.empty()) continue;
            auto it = std::find(names.begin(), names.end(), ticker);
            if (it == names.end())
                throw ConfigError(path + ": group '" + gname + "' references unknown identifier '" +
                                  ticker + "'");
            idx.push_back(static_cast<int>(it - names.begin()));
        }
        if (idx.empty())
            throw ConfigError(path + ": group '" + gname + "' is empty");
        group_names.push_back(std::move(gname));
        groups.push_back(std::move(idx));
    }
    if (groups.empty()) throw ConfigError(path + ": no groups defined");

    // make_grouping re-validates and reports uncovered stocks by index; map the
    // message back to a ticker for a friendlier error.
    std::vector<int> cover(names.size(), 0);
    for (const auto& g : groups)
        for (int i : g) ++cover[static_cast<size_t>(i)];
    for (size_t i = 0; i < names.size(); ++i)
        if (cover[i] == 0)
            throw ConfigError(path + ": stock '" + names[i] + "' is covered by no group");

    return make_grouping(std::move(group_names), std::move(groups),
                         static_cast<int>(names.size()));
}

void write_grouping(const Grouping& grouping, const std::vector<std::string>& names,
                    const std::string& path) {
    if (static_cast<int>(names.size()) != grouping.dim)
        throw ConfigError("write_grouping: name count does not match grouping dimension");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    for (int j = 0; j < grouping.m(); ++j) {
        out << grouping.names[static_cast<size_t>(j)] << ": ";
        const auto& g = grouping.groups[static_cast<size_t>(j)];
        for (size_t i = 0; i < g.size(); ++i) {
            if (i > 0) out << ',';
            out << names[static_cast<size_t>(g[i])];
        }
        out << '\n';
    }
}

}  // namespace erep
