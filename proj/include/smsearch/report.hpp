#pragma once

#include <optional>
#include <string>
#include <vector>

namespace smsearch {

// Numeric CSV; empty cells are absent values.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  int column(const std::string& name) const;  // -1 if missing
};

Table read_csv(const std::string& path);
Table parse_csv(const std::string& text);
std::string to_csv(const Table& t);

// Per-row mean and population std of every column but the first (time),
// over the runs that have a value. Columns become <name>_mean, <name>_std.
Table aggregate(const std::vector<Table>& runs);

struct Series {
  std::string column;
  std::string label;
  std::string color;
};

// Line chart of mean columns with a +-std band when the _std column exists.
// Throws std::runtime_error naming missing columns or on an empty table.
std::string svg_chart(const Table& agg, const std::string& title, const std::string& y_label,
                      const std::vector<Series>& series);

// The four standard charts, written into dir. Returns the file names.
std::vector<std::string> render_plots(const std::string& dir);

}  // namespace smsearch
