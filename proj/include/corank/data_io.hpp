// CSV data exchange for the CLI: one header row, comma-separated decimal
// numbers, rows = observations.
#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corank/grid.hpp"  // Vec

namespace corank {

struct DataTable {
    std::vector<std::string> columns;
    std::vector<Vec> rows;
};

inline DataTable read_data_csv(std::istream& in) {
    DataTable table;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_data_csv: empty input");
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ','))
            table.columns.push_back(cell);
    }
    if (table.columns.empty())
        throw std::runtime_error("read_data_csv: no columns");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        Vec values;
        while (std::getline(row, cell, ',')) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size())
                throw std::runtime_error("read_data_csv: non-numeric cell '" +
                                         cell + "' at line " +
                                         std::to_string(line_no));
            values.push_back(value);
        }
        if (values.size() != table.columns.size())
            throw std::runtime_error("read_data_csv: row width mismatch at line " +
                                     std::to_string(line_no));
        table.rows.push_back(std::move(values));
    }
    return table;
}

inline DataTable read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_data_csv: cannot open " + path);
    return read_data_csv(in);
}

inline void write_data_csv(const std::vector<Vec>& block1,
                           const std::vector<Vec>& block2, std::ostream& out) {
    const std::size_t d1 = block1.empty() ? 0 : block1.front().size();
    const std::size_t d2 = block2.empty() ? 0 : block2.front().size();
    for (std::size_t j = 0; j < d1; ++j) {
        if (j) out << ',';
        out << "x1_" << (j + 1);
    }
    for (std::size_t j = 0; j < d2; ++j) out << ",x2_" << (j + 1);
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < block1.size(); ++i) {
        for (std::size_t j = 0; j < d1; ++j) {
            if (j) out << ',';
            out << block1[i][j];
        }
        for (std::size_t j = 0; j < d2; ++j) out << ',' << block2[i][j];
        out << '\n';
    }
}

/// Split an n x (d1 + d2) table into its two blocks (first d1 columns are
/// block 1).
inline void split_blocks(const DataTable& table, int d1, int d2,
                         std::vector<Vec>& block1, std::vector<Vec>& block2) {
    if (static_cast<int>(table.columns.size()) != d1 + d2)
        throw std::runtime_error("split_blocks: expected " +
                                 std::to_string(d1 + d2) + " columns, got " +
                                 std::to_string(table.columns.size()));
    block1.clear();
    block2.clear();
    block1.reserve(table.rows.size());
    block2.reserve(table.rows.size());
    for (const Vec& row : table.rows) {
        block1.emplace_back(row.begin(), row.begin() + d1);
        block2.emplace_back(row.begin() + d1, row.end());
    }
}

}  // namespace corank
