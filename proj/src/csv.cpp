#include "parlens/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace parlens {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

CsvTable CsvTable::read(std::istream& in) {
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_line(line);
    if (!header_seen) {
      table.columns_ = std::move(fields);
      header_seen = true;
      continue;
    }
    if (fields.size() != table.columns_.size())
      throw ValidationError("CSV row has " + std::to_string(fields.size()) +
                            " cells, header has " +
                            std::to_string(table.columns_.size()));
    table.rows_.push_back(std::move(fields));
  }
  if (!header_seen) throw ValidationError("CSV has no header row");
  return table;
}

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV '" + path + "'");
  return read(in);
}

void CsvTable::append_row(std::vector<std::string> row) {
  if (row.size() != columns_.size())
    throw ValidationError("row width does not match header");
  rows_.push_back(std::move(row));
}

int CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return static_cast<int>(i);
  return -1;
}

size_t CsvTable::require_column(const std::string& name) const {
  int idx = column_index(name);
  if (idx < 0) throw MissingColumn("CSV has no column '" + name + "'");
  return static_cast<size_t>(idx);
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  size_t col = require_column(name);
  std::vector<double> values;
  values.reserve(rows_.size());
  for (const auto& row : rows_) {
    const std::string& cell = row[col];
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    bool parsed = end != cell.c_str() && *end == '\0' && !cell.empty();
    values.push_back(parsed ? v : std::numeric_limits<double>::quiet_NaN());
  }
  return values;
}

void CsvTable::write(std::ostream& out, bool schema_comment) const {
  if (schema_comment) out << "# schema=1\n";
  for (size_t i = 0; i < columns_.size(); ++i)
    out << columns_[i] << (i + 1 < columns_.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

void CsvTable::write_file(const std::string& path, bool schema_comment) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write CSV '" + path + "'");
  write(out, schema_comment);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

}  // namespace parlens
