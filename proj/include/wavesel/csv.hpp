#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace wavesel {

/// Comma-separated values with a mandatory header row, '.' decimal
/// separator, no quoting. Cells are kept as raw strings.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws std::invalid_argument when absent.
    std::size_t column_index(const std::string& name) const;
};

/// Parse a CSV file; throws std::invalid_argument when the file cannot be
/// opened or has no header.
CsvTable read_csv(const std::string& path);

/// Numeric design extracted from a table: X carries an intercept column of
/// ones followed by the requested predictors, in request order. Rows with a
/// missing or non-numeric cell in any selected column are dropped (count
/// preserved); surviving rows keep their file order.
struct Dataset {
    std::string y_name;
    std::vector<std::string> x_names;
    Eigen::MatrixXd X;
    std::vector<double> y;
    std::size_t dropped_rows = 0;
};

Dataset make_dataset(const CsvTable& table, const std::string& y_col,
                     const std::vector<std::string>& x_cols);

/// Write rows of preformatted cells under a header; '\n' line endings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Shortest decimal string that parses back to exactly the same double;
/// deterministic across runs.
std::string format_double(double value);

/// Strict full-cell double parse; returns false for empty or trailing junk.
bool parse_double(const std::string& cell, double& out);

}  // namespace wavesel
