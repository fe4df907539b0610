#include "svylasso_app/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "svylasso_app/errors.hpp"

namespace svylasso::app {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

}  // namespace

Eigen::Index CsvFrame::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == name) return static_cast<Eigen::Index>(k);
  }
  throw UserError("column '" + name + "' not found in the data header");
}

bool CsvFrame::has_column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c == name) return true;
  }
  return false;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

CsvFrame parse_csv(std::istream& in, const std::string& source) {
  CsvFrame frame;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (!have_header) {
      for (auto& f : fields) {
        f = trim(f);
        if (f.empty()) throw UserError(source + ": empty column name in header");
      }
      frame.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != frame.columns.size()) {
      throw UserError(source + ": line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(frame.columns.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const std::string cell = trim(fields[k]);
      if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
        throw UserError(source + ": missing value at line " + std::to_string(lineno) + ", column '" +
                        frame.columns[k] + "'");
      }
      if (!parse_double(cell, row[k])) {
        throw UserError(source + ": cannot parse '" + cell + "' as a number at line " + std::to_string(lineno) +
                        ", column '" + frame.columns[k] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw UserError(source + ": no header row");
  frame.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(frame.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < rows[r].size(); ++k) {
      frame.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
    }
  }
  return frame;
}

CsvFrame read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open data file '" + path + "'");
  return parse_csv(in, path);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0) out << ',';
      out << csv_field(cells[k]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

}  // namespace svylasso::app
