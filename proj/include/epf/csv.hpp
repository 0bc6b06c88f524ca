#pragma once

#include <string>
#include <vector>

namespace epf {

// Minimal CSV I/O for the engine's own formats: comma-separated, header row,
// no quoting (cells are timestamps, names, or plain decimal numbers).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  long column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);

// Shortest round-trip decimal form of v (std::to_chars).
std::string format_double(double v);
// Fixed-point with the given number of decimals, for report files.
std::string format_fixed(double v, int decimals);

double parse_double(const std::string& cell, long row, const std::string& column);

}  // namespace epf
