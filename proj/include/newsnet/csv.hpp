#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "newsnet/errors.hpp"

namespace newsnet {

// Printf %g formatting with a fixed number of significant digits. All numeric
// output goes through this so repeated runs are byte-identical.
inline std::string fmt_sig(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

// 17 significant digits round-trip a double exactly; used for intermediates
// that must reload bit-identically.
inline std::string fmt_exact(double x) { return fmt_sig(x, 17); }

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// One CSV record with double-quote escaping. Embedded newlines unsupported.
inline std::vector<std::string> csv_parse_line(std::string_view line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // tolerate CRLF
    } else {
      cur += c;
    }
    ++i;
  }
  if (quoted) throw ParseError(lineno, "unterminated quote in CSV record");
  out.push_back(cur);
  return out;
}

inline void csv_write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_quote(fields[i]);
  }
  os << '\n';
}

}  // namespace newsnet
