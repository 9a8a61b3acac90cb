#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "parlens/errors.hpp"

namespace parlens {

/// The interchange format for sweeps: a header row, comma-separated cells,
/// and a leading `# schema=1` comment. `#` lines are skipped on read.
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> columns);

  static CsvTable read(std::istream& in);
  static CsvTable read_file(const std::string& path);

  const std::vector<std::string>& columns() const { return columns_; }
  size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& row(size_t i) const { return rows_[i]; }
  const std::string& cell(size_t row, size_t col) const { return rows_[row][col]; }

  void append_row(std::vector<std::string> row);

  int column_index(const std::string& name) const;      // -1 when absent
  size_t require_column(const std::string& name) const;  // throws MissingColumn

  /// Column as doubles; cells that do not parse become NaN.
  std::vector<double> numeric_column(const std::string& name) const;

  void write(std::ostream& out, bool schema_comment = true) const;
  void write_file(const std::string& path, bool schema_comment = true) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Fixed formatting for CSV output ("%.10g"); NaN prints as "nan".
std::string format_double(double value);

}  // namespace parlens
