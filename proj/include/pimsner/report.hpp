#pragma once

// Deterministic tabular reports. A Table holds pre-formatted cell text so the
// TSV rendering and the JSON mirror carry byte-identical values; all numeric
// formatting is locale-independent (integers verbatim, rationals as "p/q",
// doubles via "%.12g").

#include <pimsner/io.hpp>
#include <pimsner/scalar.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace pimsner {

inline std::string cell_text(const std::string& s) { return s; }
inline std::string cell_text(const char* s) { return s; }
inline std::string cell_text(int v) { return std::to_string(v); }
inline std::string cell_text(long long v) { return std::to_string(v); }
inline std::string cell_text(std::size_t v) { return std::to_string(v); }
inline std::string cell_text(bool v) { return v ? "yes" : "no"; }
inline std::string cell_text(const BigInt& v) { return v.str(); }
inline std::string cell_text(const Rational& v) { return scalar_str(v); }
inline std::string cell_text(double v) { return scalar_str(v); }

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  Table(std::string name_, std::vector<std::string> columns_)
      : name(std::move(name_)), columns(std::move(columns_)) {}

  template <class... Cells>
  void add_row(const Cells&... cells) {
    std::vector<std::string> row{cell_text(cells)...};
    if (row.size() != columns.size())
      throw std::logic_error("table \"" + name + "\": row width does not match header");
    rows.push_back(std::move(row));
  }
};

inline std::string to_tsv(const Table& t) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += '\t';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline json to_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i]] = r[i];
    rows.push_back(std::move(row));
  }
  return json{{"table", t.name}, {"columns", t.columns}, {"rows", rows}};
}

// Renders one or more tables in the requested format. TSV concatenates the
// tables with a "# name" marker line before each; JSON emits an array of
// table objects (a single object when there is exactly one table).
inline void print_tables(std::ostream& os, const std::vector<Table>& tables,
                         const std::string& format) {
  if (format == "tsv") {
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (tables.size() > 1) os << "# " << tables[i].name << '\n';
      os << to_tsv(tables[i]);
      if (tables.size() > 1 && i + 1 < tables.size()) os << '\n';
    }
    return;
  }
  if (format == "json") {
    if (tables.size() == 1) {
      os << to_json(tables[0]).dump(2) << '\n';
      return;
    }
    json arr = json::array();
    for (const auto& t : tables) arr.push_back(to_json(t));
    os << arr.dump(2) << '\n';
    return;
  }
  throw std::invalid_argument("unknown output format \"" + format + "\"");
}

}  // namespace pimsner
