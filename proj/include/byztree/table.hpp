#pragma once

// Delimited result tables: '#'-prefixed key=value metadata lines, one header
// line of column names, then numeric rows printed with 9 significant digits.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace byztree {

inline constexpr const char* kVersion = "0.1.0";

class TableFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResultTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  ResultTable() = default;
  ResultTable(std::string command, std::uint64_t seed, std::vector<std::string> cols)
      : columns(std::move(cols)) {
    metadata = {{"command", std::move(command)},
                {"seed", std::to_string(seed)},
                {"version", kVersion}};
  }

  void setMeta(const std::string& key, std::string value) {
    for (auto& [k, v] : metadata) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    metadata.emplace_back(key, std::move(value));
  }

  std::optional<std::string> meta(const std::string& key) const {
    for (const auto& [k, v] : metadata) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  void addRow(std::vector<double> row) {
    if (row.size() != columns.size()) {
      throw TableFormatError("row has " + std::to_string(row.size()) + " cells, table has " +
                             std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
  }

  std::size_t columnIndex(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::out_of_range("no column named " + name);
  }

  double at(std::size_t row, const std::string& column) const {
    return rows.at(row).at(columnIndex(column));
  }
};

inline std::string formatCell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void writeTable(std::ostream& os, const ResultTable& table, char delim = ',') {
  for (const auto& [k, v] : table.metadata) {
    os << "# " << k << '=' << v << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? std::string(1, delim) : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? std::string(1, delim) : "") << formatCell(row[i]);
    }
    os << '\n';
  }
}

inline std::string toString(const ResultTable& table) {
  std::ostringstream os;
  writeTable(os, table);
  return os.str();
}

namespace detail {

inline std::vector<std::string> splitLine(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delim)) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == delim) {
    out.emplace_back();
  }
  return out;
}

}  // namespace detail

inline ResultTable readTable(std::istream& is, char delim = ',') {
  ResultTable table;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        throw TableFormatError("line " + std::to_string(line_no) + ": metadata without '='");
      }
      table.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    auto cells = detail::splitLine(line, delim);
    if (!have_header) {
      table.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw TableFormatError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.columns.size()) + " cells, got " +
                             std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size()) {
        throw TableFormatError("line " + std::to_string(line_no) + ": non-numeric cell '" + c + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw TableFormatError("table has no header line");
  }
  for (const char* key : {"command", "seed", "version"}) {
    if (!table.meta(key)) {
      throw TableFormatError(std::string("missing metadata key '") + key + "'");
    }
  }
  return table;
}

inline ResultTable parseTable(const std::string& text) {
  std::istringstream is(text);
  return readTable(is);
}

}  // namespace byztree
