#pragma once

// Minimal numeric CSV: header row always present, '\n' line endings,
// '.' decimal separator, no quoting.

#include <iosfwd>
#include <string>
#include <vector>

namespace dlab::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column; throws DataError if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

/// Parses a numeric table. Throws DataError (with line number) on ragged
/// rows or non-numeric cells; `expected_header`, when non-empty, must match.
Table read(std::istream& in, const std::vector<std::string>& expected_header = {});
Table read_file(const std::string& path, const std::vector<std::string>& expected_header = {});

enum class Precision { table, full };

Precision parse_precision(const std::string& name);  // "table" | "full"

/// "%.5f" in table mode, shortest round-trip "%.17g" in full mode.
std::string format(double value, Precision precision);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace dlab::csv
