#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace thlab {

// Round-trip decimal rendering with 17 significant digits; negative zero
// prints as 0.
inline std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
    return buf;
}

// Comma-separated rows with a header line and LF endings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open " + path + " for writing");
        cells(header);
    }

    void row(std::initializer_list<double> values) {
        std::string line;
        for (double v : values) {
            if (!line.empty()) line += ',';
            line += fmt_num(v);
        }
        out_ << line << '\n';
    }

    void row(const std::vector<double>& values) {
        std::string line;
        for (double v : values) {
            if (!line.empty()) line += ',';
            line += fmt_num(v);
        }
        out_ << line << '\n';
    }

    // Rows with leading text cells, e.g. a name or a kind label.
    void cells(const std::vector<std::string>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += values[i];
        }
        out_ << line << '\n';
    }

private:
    std::ofstream out_;
};

// Reads a numeric CSV with a header row into named columns.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return columns[i];
        throw Error("missing CSV column " + name);
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out(1);
    for (char ch : line) {
        if (ch == ',') out.emplace_back();
        else if (ch != '\r') out.back() += ch;
    }
    return out;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV " + path);
    t.header = split_csv_line(line);
    t.columns.resize(t.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != t.header.size()) throw Error("ragged CSV row in " + path);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                t.columns[i].push_back(std::stod(cells[i]));
            } catch (const std::exception&) {
                throw Error("non-numeric CSV cell '" + cells[i] + "' in " + path);
            }
        }
    }
    return t;
}

}  // namespace thlab
