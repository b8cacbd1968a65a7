#pragma once

// Minimal CSV support: UTF-8, header row, '.' decimal separator, numbers
// printed with 17 significant digits so values round-trip exactly.

#include <iosfwd>
#include <string>
#include <vector>

namespace bilip {

/// "%.17g" formatting (the program never changes the C locale).
std::string format_double(double v);

/// Whole-string strtod (accepts subnormals, inf, nan); throws
/// std::invalid_argument on trailing garbage.
double parse_double(const std::string& s);

using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
};

void write_csv_row(std::ostream& out, const CsvRow& row);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

/// Parses comma-separated text with a header row. Quoted fields are not
/// supported; no field this project writes contains a comma.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace bilip
