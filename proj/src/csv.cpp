#include "freelab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "freelab/error.hpp"

namespace freelab::csv {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.9g}", v);
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) body_ += ',';
    body_ += header_[i];
  }
  body_ += '\n';
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("row has {} cells, header has {}", row.size(), header_.size()));
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) body_ += ',';
    if (const auto* d = std::get_if<double>(&row[i])) body_ += format_number(*d);
    else if (const auto* n = std::get_if<std::int64_t>(&row[i])) body_ += std::to_string(*n);
    else body_ += std::get<std::string>(row[i]);
  }
  body_ += '\n';
  ++rows_;
}

std::size_t NumericTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorKind::config, fmt::format("missing column '{}'", name));
}

NumericTable read_numeric(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, fmt::format("cannot open {}", path.string()));
  NumericTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorKind::config, fmt::format("{}:{}: expected {} fields, found {}",
                                                 path.string(), line_no, table.header.size(),
                                                 cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc{} || ptr != c.data() + c.size()) {
        throw Error(ErrorKind::config,
                    fmt::format("{}:{}: '{}' is not a number", path.string(), line_no, c));
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) {
    throw Error(ErrorKind::config, fmt::format("{}: missing header row", path.string()));
  }
  return table;
}

}  // namespace freelab::csv
