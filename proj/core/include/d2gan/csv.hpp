#pragma once

#include <string>
#include <vector>

#include "d2gan/data.hpp"

namespace d2gan {

/// Shortest decimal string that parses back to exactly `v` (std::to_chars).
/// Non-finite values print as nan, inf and -inf.
std::string format_double(double v);
/// Inverse of format_double. An empty field parses as NaN.
double parse_double(const std::string& field);

/// Plain comma-separated table; no quoting (fields never contain commas).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

/// n x 2 point sets with header `x,y`.
void write_points_csv(const std::string& path, const Matrix& points);
Matrix read_points_csv(const std::string& path);

}  // namespace d2gan
