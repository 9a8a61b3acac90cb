#pragma once

#include <string>

#include "parlens/csv.hpp"

namespace parlens {

/// Standalone SVG scatter plot of two numeric CSV columns, with axes, the
/// least-squares line, and an r annotation when both columns vary. Rows with
/// non-numeric cells are dropped.
void render_scatter(const CsvTable& table, const std::string& x_column,
                    const std::string& y_column, const std::string& out_path);

}  // namespace parlens
