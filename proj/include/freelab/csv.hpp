#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

// Comma-separated tables with a header row. Numbers are written with nine
// significant digits so repeated runs are byte-identical.

namespace freelab::csv {

using Cell = std::variant<double, std::int64_t, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_; }
  std::string str() const { return body_; }

 private:
  std::vector<std::string> header_;
  std::string body_;
  std::size_t rows_ = 0;
};

std::string format_number(double v);

struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(const std::string& name) const;  // throws config error
};

/// Numeric table with a header row. Parse errors name the file and line.
NumericTable read_numeric(const std::filesystem::path& path);

}  // namespace freelab::csv
