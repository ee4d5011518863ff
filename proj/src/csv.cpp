#include "dlab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dlab/errors.hpp"

namespace dlab::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw DataError("line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError("missing CSV column '" + name + "'");
}

std::vector<double> Table::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

Table read(std::istream& in, const std::vector<std::string>& expected_header) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      // strip a UTF-8 byte order mark
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      t.header = split(line);
      if (!expected_header.empty() && t.header != expected_header) {
        std::string want;
        for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
        throw DataError("unexpected CSV header '" + line + "', expected '" + want + "'");
      }
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(t.header.size()) + " columns, got " +
                      std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw DataError("empty CSV input");
  return t;
}

Table read_file(const std::string& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read(in, expected_header);
}

Precision parse_precision(const std::string& name) {
  if (name == "table") return Precision::table;
  if (name == "full") return Precision::full;
  throw ValidationError("unknown precision '" + name + "' (expected table or full)");
}

std::string format(double value, Precision precision) {
  char buf[64];
  if (precision == Precision::table) {
    std::snprintf(buf, sizeof buf, "%.5f", value);
    // avoid "-0.00000"
    if (std::string(buf) == "-0.00000") return "0.00000";
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", value);
  }
  return buf;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace dlab::csv
