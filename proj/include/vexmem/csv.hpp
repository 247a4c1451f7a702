#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vexmem/error.hpp"

namespace vexmem {

/// A rectangular table of already formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
      throw InvariantError("CsvTable: row has " + std::to_string(row.size()) + " cells, header has " +
                           std::to_string(header.size()));
    rows.push_back(std::move(row));
  }

  bool operator==(const CsvTable&) const = default;
};

/// 17 significant digits, so that parsing recovers the double exactly.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_number(long long v) { return std::to_string(v); }
inline std::string csv_number(std::size_t v) { return std::to_string(v); }
inline std::string csv_number(int v) { return std::to_string(v); }

namespace detail {

inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_line(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
  os << '\n';
}

}  // namespace detail

inline void emit_csv(const CsvTable& table, std::ostream& os) {
  detail::write_line(os, table.header);
  for (const auto& row : table.rows) detail::write_line(os, row);
}

inline std::string emit_csv(const CsvTable& table) {
  std::ostringstream os;
  emit_csv(table, os);
  return os.str();
}

/// Writes the table to `path`; IoError when the file cannot be written.
inline void emit_csv(const CsvTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  emit_csv(table, f);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

/// Inverse of emit_csv: first line is the header.
inline CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> current;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      current.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      current.push_back(std::move(cell));
      cell.clear();
      lines.push_back(std::move(current));
      current.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw ParseError("parse_csv: unterminated quote");
  if (any) {
    current.push_back(std::move(cell));
    lines.push_back(std::move(current));
  }
  CsvTable t;
  if (lines.empty()) return t;
  t.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.header.size()) throw ParseError("parse_csv: ragged row " + std::to_string(i));
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

}  // namespace vexmem
