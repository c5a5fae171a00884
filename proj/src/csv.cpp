#include "wavesel/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavesel {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw std::invalid_argument("no column named '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("'" + path + "' has no header row");
    table.columns = split_line(strip_cr(line));
    if (table.columns.empty()) throw std::invalid_argument("'" + path + "' has an empty header");
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        table.rows.push_back(split_line(line));
    }
    return table;
}

bool parse_double(const std::string& cell, double& out) {
    std::size_t begin = cell.find_first_not_of(" \t");
    if (begin == std::string::npos) return false;
    const std::size_t end = cell.find_last_not_of(" \t") + 1;
    const std::string trimmed = cell.substr(begin, end - begin);
    errno = 0;
    char* parse_end = nullptr;
    const double value = std::strtod(trimmed.c_str(), &parse_end);
    if (parse_end != trimmed.c_str() + trimmed.size() || errno == ERANGE) return false;
    out = value;
    return true;
}

Dataset make_dataset(const CsvTable& table, const std::string& y_col,
                     const std::vector<std::string>& x_cols) {
    if (x_cols.empty()) throw std::invalid_argument("make_dataset: no predictor columns selected");
    const std::size_t y_index = table.column_index(y_col);
    std::vector<std::size_t> x_index;
    x_index.reserve(x_cols.size());
    for (const std::string& name : x_cols) x_index.push_back(table.column_index(name));

    std::vector<double> y;
    std::vector<std::vector<double>> x_rows;
    std::size_t dropped = 0;
    for (const auto& row : table.rows) {
        bool complete = row.size() >= table.columns.size();
        double y_value = 0.0;
        std::vector<double> x_values(x_cols.size());
        complete = complete && parse_double(row[y_index], y_value);
        for (std::size_t j = 0; complete && j < x_index.size(); ++j) {
            complete = parse_double(row[x_index[j]], x_values[j]);
        }
        if (!complete) {
            ++dropped;
            continue;
        }
        y.push_back(y_value);
        x_rows.push_back(std::move(x_values));
    }

    Dataset ds;
    ds.y_name = y_col;
    ds.x_names = x_cols;
    ds.dropped_rows = dropped;
    ds.y = std::move(y);
    ds.X.resize(static_cast<Eigen::Index>(ds.y.size()),
                static_cast<Eigen::Index>(x_cols.size() + 1));
    for (std::size_t i = 0; i < x_rows.size(); ++i) {
        ds.X(static_cast<Eigen::Index>(i), 0) = 1.0;
        for (std::size_t j = 0; j < x_cols.size(); ++j) {
            ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = x_rows[i][j];
        }
    }
    return ds;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

}  // namespace wavesel
