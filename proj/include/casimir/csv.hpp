#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace casimir {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

namespace detail {
inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
} // namespace detail

/// Reads a numeric CSV with a single header line. Lines starting with '#'
/// and blank lines are skipped. Ragged or non-numeric rows raise with the
/// file name and line number.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;

        std::vector<std::string> cells;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(detail::trim(cell));

        if (table.header.empty()) {
            table.header = cells;
            continue;
        }
        if (cells.size() != table.header.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(table.header.size()) +
                                     " columns, got " + std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                row[i] = std::stod(cells[i]);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": not a number: '" + cells[i] + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw std::runtime_error(path + ": empty file");
    return table;
}

/// Formats x with `digits` significant figures in plain decimal notation
/// (report columns stay aligned with fixed-point style where possible).
inline std::string format_sig(double x, int digits) {
    char buf[64];
    if (x == 0.0) {
        std::snprintf(buf, sizeof buf, "%.*f", digits - 1, 0.0);
        return buf;
    }
    const double ax = x < 0 ? -x : x;
    const int exponent = static_cast<int>(std::floor(std::log10(ax)));
    if (exponent >= digits || exponent < -4) {
        std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    } else {
        const int decimals = digits - 1 - exponent;
        std::snprintf(buf, sizeof buf, "%.*f", decimals < 0 ? 0 : decimals, x);
    }
    return buf;
}

/// Writes `content` to `path` atomically: compose fully, then replace.
/// No partial output files are left behind on error.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::remove(path.c_str());
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

} // namespace casimir
