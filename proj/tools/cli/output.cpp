#include "output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace qmoney::cli {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row has the wrong width");
  rows.push_back(std::move(row));
}

const std::vector<std::string>& standard_columns() {
  static const std::vector<std::string> cols{"scenario", "phase_randomized", "mu", "eta_d",
                                             "e",        "f_h",              "f_d", "e_star",
                                             "gap",      "secure",           "t_star"};
  return cols;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double rounded(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

namespace {

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(double v) const {
      if (std::isfinite(v)) return rounded(v);
      return format_number(v);
    }
    nlohmann::ordered_json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

void write_csv(std::ostream& os, const Table& t, const std::optional<std::string>& header) {
  if (header) os << "# " << *header << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& t, const std::string& command,
                const std::optional<std::string>& generated) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  if (generated) doc["generated"] = *generated;
  doc["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

}  // namespace qmoney::cli
