#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

// Versioned CSV tables: a `#schema=name/version` line, a header line, then
// one comma-separated row per record.
namespace stdissim {

struct CsvTable {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    CsvTable() = default;
    CsvTable(std::string schema_, std::vector<std::string> columns_)
        : schema(std::move(schema_)), columns(std::move(columns_)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != columns.size())
            throw InvalidInput("table " + schema + ": row has " + std::to_string(row.size()) + " cells, expected " +
                               std::to_string(columns.size()));
        rows.push_back(std::move(row));
    }

    std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw InvalidInput("table " + schema + ": no column '" + std::string(name) + "'");
    }

    std::vector<double> numeric_column(std::string_view name) const {
        const std::size_t c = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(parse_double(r[c]));
        return out;
    }

    std::string str() const {
        std::string s = "#schema=" + schema + "\n";
        auto line = [&s](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) s += ',';
                s += cells[i];
            }
            s += '\n';
        };
        line(columns);
        for (const auto& r : rows) line(r);
        return s;
    }
};

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "1" : "0"; }

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = line.find(',');
        out.emplace_back(line.substr(0, comma));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return out;
}

inline CsvTable parse_table(std::istream& in, const std::string& origin = "csv") {
    std::string line;
    CsvTable t;
    bool have_schema = false, have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_schema) {
            if (line.rfind("#schema=", 0) != 0) throw InvalidInput(origin + ": first line must be '#schema=...'");
            t.schema = line.substr(8);
            have_schema = true;
            continue;
        }
        if (line.front() == '#') continue;
        if (!have_header) {
            t.columns = split_csv_line(line);
            have_header = true;
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != t.columns.size())
            throw InvalidInput(origin + ": row " + std::to_string(t.rows.size() + 1) + " has " +
                               std::to_string(cells.size()) + " cells, header has " + std::to_string(t.columns.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_schema) throw InvalidInput(origin + ": empty file");
    if (!have_header) throw InvalidInput(origin + ": missing header line");
    return t;
}

inline CsvTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return parse_table(in, path);
}

} // namespace stdissim
