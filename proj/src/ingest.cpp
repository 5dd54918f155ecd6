#include "levytrunc/ingest.hpp"

#include "levytrunc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace levytrunc {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(trim(cell));
    }
    return cells;
}

std::optional<double> to_double(const std::string& s) {
    double value = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end || s.empty()) {
        return std::nullopt;
    }
    return value;
}

} // namespace

InputFormat parse_input_format(const std::string& name) {
    if (name == "increments") {
        return InputFormat::increments;
    }
    if (name == "prices") {
        return InputFormat::prices;
    }
    throw ConfigError("unknown input format '" + name + "' (expected increments or prices)");
}

IngestResult ingest_csv(std::istream& is, InputFormat format) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (!line.empty()) {
            rows.push_back(split_row(line));
        }
    }
    std::size_t column = 0;
    std::size_t first = 0;
    if (!rows.empty() && !to_double(rows.front().front())) {
        if (format == InputFormat::increments) {
            const auto& header = rows.front();
            const auto it = std::find(header.begin(), header.end(), "increment");
            column = it == header.end() ? 0 : static_cast<std::size_t>(it - header.begin());
        }
        first = 1;
    }

    std::vector<double> a;
    std::vector<double> b;
    const std::size_t width = format == InputFormat::prices ? 2 : column + 1;
    for (std::size_t r = first; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() < width) {
            throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                            " column(s), expected at least " + std::to_string(width));
        }
        const auto x = to_double(row[format == InputFormat::prices ? 0 : column]);
        const auto y = format == InputFormat::prices ? to_double(row[1]) : std::optional<double>(0.0);
        if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
            throw DataError("row " + std::to_string(r + 1) + " is not numeric");
        }
        a.push_back(*x);
        b.push_back(*y);
    }

    IngestResult out;
    if (format == InputFormat::increments) {
        if (a.empty()) {
            throw DataError("increment input has no rows");
        }
        out.increments = std::move(a);
        return out;
    }
    if (a.size() < 2) {
        throw DataError("price input needs at least 2 rows, got " + std::to_string(a.size()));
    }
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (!(a[i] > a[i - 1])) {
            throw DataError("non-increasing timestamps at row " + std::to_string(first + i + 1));
        }
    }
    const double spacing = (a.back() - a.front()) / static_cast<double>(a.size() - 1);
    double worst = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) {
        worst = std::max(worst, std::abs((a[i] - a[i - 1]) - spacing));
    }
    if (worst > kSpacingTolerance * spacing) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "irregular spacing: max deviation " << worst << " from mean spacing " << spacing;
        throw DataError(msg.str());
    }
    out.delta_n = spacing;
    for (std::size_t i = 1; i < b.size(); ++i) {
        out.increments.push_back(b[i] - b[i - 1]);
    }
    return out;
}

IngestResult ingest_csv(const std::string& path, InputFormat format) {
    std::ifstream is(path);
    if (!is) {
        throw DataError("cannot open " + path);
    }
    return ingest_csv(is, format);
}

} // namespace levytrunc
