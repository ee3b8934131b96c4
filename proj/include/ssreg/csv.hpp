#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ssreg {

//! Formats with %.<sig>g; used everywhere a real lands in text output so that
//! identical values always render identically.
std::string fmt_g(double v, int significant = 12);

//! Fixed-point format with <decimals> places, for Monte-Carlo frequencies whose
//! trailing digits are noise.
std::string fmt_f(double v, int decimals);

//! Writes a dense matrix as headered CSV (columns c1..cp, one row per line).
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M);

//! Reads a matrix written by write_matrix_csv (any header names accepted).
Eigen::MatrixXd read_matrix_csv(const std::string& path);

//! Minimal CSV table writer with a fixed header; cells must not contain commas.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    ~CsvWriter();
    void write_row(const std::vector<std::string>& cells);
    void close();

private:
    struct Impl;
    Impl* impl_;
    std::size_t ncols_;
};

//! Splits one CSV line on commas (no quoting support needed for our outputs).
std::vector<std::string> split_csv_line(const std::string& line);

//! Loads a headered CSV into column-name -> cell rows.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    int col(const std::string& name) const;  // -1 when absent
    double num(std::size_t row, const std::string& name) const;
    const std::string& cell(std::size_t row, const std::string& name) const;
};
CsvTable read_csv_table(const std::string& path);

} // namespace ssreg
