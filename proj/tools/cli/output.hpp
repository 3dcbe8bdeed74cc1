#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qmoney::cli {

// Empty, text, number or flag.
using Cell = std::variant<std::monostate, std::string, double, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

// Columns shared by every command.
const std::vector<std::string>& standard_columns();

// %.9g; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);
// The value the emitted text parses back to.
double rounded(double v);

void write_csv(std::ostream& os, const Table& t, const std::optional<std::string>& header);
void write_json(std::ostream& os, const Table& t, const std::string& command,
                const std::optional<std::string>& generated);

}  // namespace qmoney::cli
