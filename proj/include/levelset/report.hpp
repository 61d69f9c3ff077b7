#pragma once

// Tabular reports written as CSV or JSON Lines. Reals use 17 significant digits,
// JSONL keys are exactly the CSV headers, lines end in LF.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "levelset/error.hpp"

namespace levelset {

enum class Format { csv, jsonl };

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "jsonl") return Format::jsonl;
  throw UsageError("unknown format: " + std::string(s) + " (expected csv or jsonl)");
}

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw UsageError("report row width does not match its header");
    rows.push_back(std::move(row));
  }
};

/// %.17g; non-finite values as nan, inf, -inf.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

inline std::string json_string(const std::string& s) {
  std::string q = "\"";
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': q += "\\\""; break;
      case '\\': q += "\\\\"; break;
      case '\n': q += "\\n"; break;
      case '\t': q += "\\t"; break;
      default:
        if (ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          q += buf;
        } else {
          q += static_cast<char>(ch);
        }
    }
  }
  return q + '"';
}

struct CsvCell {
  std::string operator()(double v) const { return format_real(v); }
  std::string operator()(long long v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
  std::string operator()(const std::string& v) const { return csv_field(v); }
};

// JSON has no non-finite numbers; they become null.
struct JsonCell {
  std::string operator()(double v) const { return std::isfinite(v) ? format_real(v) : "null"; }
  std::string operator()(long long v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
  std::string operator()(const std::string& v) const { return json_string(v); }
};

}  // namespace detail

inline void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << detail::csv_field(t.columns[c]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << std::visit(detail::CsvCell{}, row[c]);
    os << '\n';
  }
}

inline void write_jsonl(const Table& t, std::ostream& os) {
  for (const auto& row : t.rows) {
    os << '{';
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << detail::json_string(t.columns[c]) << ':' << std::visit(detail::JsonCell{}, row[c]);
    os << "}\n";
  }
}

inline void write_table(const Table& t, Format f, std::ostream& os) {
  if (f == Format::csv) {
    write_csv(t, os);
  } else {
    write_jsonl(t, os);
  }
}

}  // namespace levelset
