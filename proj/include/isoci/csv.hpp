#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "isoci/errors.hpp"

namespace isoci {

//! Shortest round-trip decimal representation of a double.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace csv {

struct Row {
  std::size_t line_number = 0;
  std::vector<std::string> fields;
};

//! Reads a CSV file; skips blank lines and '#' comment lines. Throws
//! DataError naming the file when it cannot be opened.
inline std::vector<Row> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    Row row;
    row.line_number = lineno;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const std::size_t b = field.find_first_not_of(" \t");
      const std::size_t e = field.find_last_not_of(" \t");
      row.fields.push_back(b == std::string::npos
                               ? std::string()
                               : field.substr(b, e - b + 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

inline double require_double(const Row& row, std::size_t field,
                             const std::string& path) {
  double v;
  if (field >= row.fields.size() || !parse_double(row.fields[field], v))
    throw DataError(path + ":" + std::to_string(row.line_number) +
                    ": cannot parse field " + std::to_string(field + 1) +
                    " as a number");
  return v;
}

//! Writes lines to `path` atomically (temp file + rename).
inline void write_file(const std::string& path,
                       const std::vector<std::string>& lines) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot open output file: " + tmp);
    for (const auto& l : lines) out << l << '\n';
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw DataError("cannot move temporary file onto " + path);
}

} // namespace csv
} // namespace isoci
