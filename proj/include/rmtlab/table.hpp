#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rmtlab/error.hpp"

// Tabular results with a fixed column schema, serialised as CSV or JSON.

namespace rmtlab {

struct TableSchema {
  std::string_view name;
  std::vector<std::string_view> columns;
};

namespace schema {

inline const TableSchema shift{
    "shift", {"index", "gamma", "f1", "f1_stderr", "f2", "mean_a", "mean_b", "median_a", "median_b"}};
inline const TableSchema profile{"profile", {"index", "gamma", "second_moment", "stderr"}};
inline const TableSchema moments{
    "moments", {"experiment_id", "n", "k", "estimate", "std_error", "target", "z_score"}};
inline const TableSchema delta{"delta", {"n", "trials", "delta", "std_error", "argmax", "delta_times_n"}};
inline const TableSchema counting_variance{
    "counting-variance",
    {"n", "trials", "lo", "hi", "mean", "variance", "expected", "variance_over_log_n",
     "concentrated_fraction"}};
inline const TableSchema walks{"walks", {"profile", "m", "count", "closed_form"}};
inline const TableSchema selftest{"selftest", {"check", "argument", "value", "expected", "pass"}};

}  // namespace schema

using Cell = std::variant<std::int64_t, double, std::string>;

/// Doubles print with 17 significant digits, which round-trips every value.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), r.ptr);
}

class Table {
 public:
  explicit Table(const TableSchema& s) : schema_(&s) {}

  const TableSchema& schema() const { return *schema_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != schema_->columns.size())
      throw InvalidArgument("table " + std::string(schema_->name) + ": row has " +
                            std::to_string(row.size()) + " cells, schema has " +
                            std::to_string(schema_->columns.size()));
    rows_.push_back(std::move(row));
  }

  void write_csv(std::ostream& os) const {
    write_record(os, schema_->columns);
    for (const auto& row : rows_) {
      std::vector<std::string> text;
      for (const auto& c : row) text.push_back(cell_text(c));
      write_record(os, text);
    }
  }

  /// {"schema": name, "columns": [...], "rows": [[...], ...]}
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = schema_->name;
    j["columns"] = nlohmann::ordered_json::array();
    for (auto c : schema_->columns) j["columns"].push_back(c);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      auto r = nlohmann::ordered_json::array();
      for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
      j["rows"].push_back(std::move(r));
    }
    return j;
  }

 private:
  static std::string cell_text(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::get<std::string>(c);
  }

  template <class Strings>
  static void write_record(std::ostream& os, const Strings& fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) os << ',';
      first = false;
      os << f;
    }
    os << '\n';
  }

  const TableSchema* schema_;
  std::vector<std::vector<Cell>> rows_;
};

inline Cell cell(std::size_t v) { return static_cast<std::int64_t>(v); }
inline Cell cell(int v) { return static_cast<std::int64_t>(v); }
inline Cell cell(double v) { return v; }
inline Cell cell(std::string v) { return v; }

}  // namespace rmtlab
