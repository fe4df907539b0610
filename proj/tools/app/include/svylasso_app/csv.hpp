#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace svylasso::app {

/// Numeric CSV contents: a header row and one double per cell.
struct CsvFrame {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // rows × columns

  /// Index of a named column; throws UserError when absent.
  Eigen::Index column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Comma-separated, header required, "." decimal, optional double quotes
/// around fields. Empty or non-numeric cells are errors that name the line
/// and column.
CsvFrame parse_csv(std::istream& in, const std::string& source = "<input>");
CsvFrame read_csv(const std::string& path);

/// Splits one CSV record, honoring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Shortest text that reads back to the same double at 15 significant digits.
std::string format_number(double v);

/// Writes a header and rows of preformatted cells.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace svylasso::app
