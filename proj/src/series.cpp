#include "cointopo/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace cointopo {

const TimeSeries& MultiSeries::channel(const std::string& label) const {
    for (const auto& ch : channels) {
        if (ch.label == label) return ch;
    }
    throw SchemaError("no channel named '" + label + "'");
}

bool MultiSeries::has_channel(const std::string& label) const {
    return std::any_of(channels.begin(), channels.end(),
                       [&](const TimeSeries& ch) { return ch.label == label; });
}

std::vector<std::string> MultiSeries::labels() const {
    std::vector<std::string> out;
    out.reserve(channels.size());
    for (const auto& ch : channels) out.push_back(ch.label);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool is_nan_literal(const std::string& cell) {
    if (cell.size() != 3) return false;
    return std::tolower(static_cast<unsigned char>(cell[0])) == 'n' &&
           std::tolower(static_cast<unsigned char>(cell[1])) == 'a' &&
           std::tolower(static_cast<unsigned char>(cell[2])) == 'n';
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    if (cell.empty() || is_nan_literal(cell)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse value '" +
                         cell + "'");
    }
    return value;
}

}  // namespace

MultiSeries parse_csv(const std::string& text,
                      const std::vector<std::string>& expected_labels) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty input: no header row");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_row(line);

    {
        std::set<std::string> seen;
        for (const auto& h : header) {
            if (!seen.insert(h).second) {
                throw SchemaError("duplicate channel label '" + h + "' in header");
            }
        }
    }

    // Column positions to extract, in output order.
    std::vector<std::size_t> cols;
    std::vector<std::string> out_labels;
    if (expected_labels.empty()) {
        cols.resize(header.size());
        std::iota(cols.begin(), cols.end(), std::size_t{0});
        out_labels = header;
    } else {
        for (const auto& want : expected_labels) {
            auto it = std::find(header.begin(), header.end(), want);
            if (it == header.end()) {
                throw SchemaError("header is missing expected label '" + want + "'");
            }
            cols.push_back(static_cast<std::size_t>(it - header.begin()));
            out_labels.push_back(want);
        }
    }

    MultiSeries ms;
    ms.channels.resize(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) ms.channels[c].label = out_labels[c];

    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_row(line);
        if (cells.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            ms.channels[c].values.push_back(parse_cell(cells[cols[c]], line_no));
        }
        ms.index.push_back(row++);
    }
    return ms;
}

MultiSeries load_csv(const std::string& path,
                     const std::vector<std::string>& expected_labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_csv(buf.str(), expected_labels);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

MultiSeries drop_missing(const MultiSeries& ms) {
    MultiSeries out;
    out.channels.resize(ms.channels.size());
    for (std::size_t c = 0; c < ms.channels.size(); ++c) {
        out.channels[c].label = ms.channels[c].label;
    }
    const std::size_t n = ms.length();
    for (std::size_t r = 0; r < n; ++r) {
        bool keep = true;
        for (const auto& ch : ms.channels) {
            if (!std::isfinite(ch.values[r])) {
                keep = false;
                break;
            }
        }
        if (!keep) continue;
        for (std::size_t c = 0; c < ms.channels.size(); ++c) {
            out.channels[c].values.push_back(ms.channels[c].values[r]);
        }
        out.index.push_back(r < ms.index.size() ? ms.index[r] : r);
    }
    if (out.length() == 0) throw DataError("no rows remain after dropping missing values");
    return out;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TimeSeries standardize(const TimeSeries& ts) {
    if (ts.size() < 2) throw DataError("standardize: need at least 2 samples");
    const double m = mean(ts.values);
    const double sd = sample_stddev(ts.values);
    if (!(sd > 0.0)) {
        throw DataError("standardize: degenerate variance (constant series '" + ts.label +
                        "')");
    }
    TimeSeries out;
    out.label = ts.label;
    out.values.reserve(ts.size());
    for (double x : ts.values) out.values.push_back((x - m) / sd);
    return out;
}

TimeSeries difference(const TimeSeries& ts, int order) {
    if (order < 0) throw ParamError("difference: order must be nonnegative");
    if (ts.size() <= static_cast<std::size_t>(order)) {
        throw DataError("difference: series of length " + std::to_string(ts.size()) +
                        " too short for order " + std::to_string(order));
    }
    TimeSeries out = ts;
    for (int k = 0; k < order; ++k) {
        std::vector<double> next(out.values.size() - 1);
        for (std::size_t i = 0; i + 1 < out.values.size(); ++i) {
            next[i] = out.values[i + 1] - out.values[i];
        }
        out.values = std::move(next);
    }
    return out;
}

}  // namespace cointopo
