#pragma once

// Tabular output: CSV with a unit-annotated header and shortest round-trip
// decimals, or the same table as JSON.

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace fpbh::cli {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;  // "name [unit]"
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> r) { rows.push_back(std::move(r)); }
};

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      if (const auto* d = std::get_if<double>(&r[i])) out << format_double(*d);
      else out << std::get<std::string>(r[i]);
    }
    out << '\n';
  }
}

inline nlohmann::json table_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json o = nlohmann::json::array();
    for (const auto& c : r) {
      if (const auto* d = std::get_if<double>(&c)) o.push_back(*d);
      else o.push_back(std::get<std::string>(c));
    }
    rows.push_back(o);
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

/// Row-at-a-time CSV writer for long outputs.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << format_double(v[i]);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace fpbh::cli
