#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "jnoise/core.hpp"

namespace jnoise {

// Minimal CSV: comma-separated, LF line endings, '.' decimal separator
// regardless of locale. Doubles are printed with shortest round-trip
// precision, so reopening a report reproduces the exact values.
using CsvCell = std::variant<std::string, double, long long>;

inline std::string csv_format(const CsvCell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    char buf[64];
    if (const auto* d = std::get_if<double>(&cell)) {
        const auto res = std::to_chars(buf, buf + sizeof buf, *d);
        return std::string(buf, res.ptr);
    }
    const auto v = std::get<long long>(cell);
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<CsvCell> row) {
        if (row.size() != header_.size()) throw DomainError("csv: row width mismatch");
        rows_.push_back(std::move(row));
    }

    std::string str() const {
        std::string out;
        for (size_t i = 0; i < header_.size(); ++i)
            out += header_[i] + (i + 1 == header_.size() ? "\n" : ",");
        for (const auto& row : rows_) {
            for (size_t i = 0; i < row.size(); ++i)
                out += csv_format(row[i]) + (i + 1 == row.size() ? "\n" : ",");
        }
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
        if (!out) throw DomainError("csv: cannot open " + path.string());
        const std::string s = str();
        out.write(s.data(), static_cast<std::streamsize>(s.size()));
        if (!out) throw DomainError("csv: write failed for " + path.string());
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

/// Parse a CSV produced by CsvWriter back into string cells (tests and the
/// calibration loader convert fields as needed).
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("csv: cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline double csv_to_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("csv: malformed numeric field '" + s + "'");
    return v;
}

}  // namespace jnoise
