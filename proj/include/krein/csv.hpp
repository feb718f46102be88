#pragma once

#include <string>
#include <variant>
#include <vector>

namespace krein {

/// Floats are written with 17 significant digits, which round-trips every
/// double exactly.
std::string format_double(double value);

using CsvCell = std::variant<double, long long, std::string>;

/// Comma-separated table with a header line. Fields never contain commas,
/// quotes or newlines, so no quoting is done.
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  const std::string& cell(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;

  void add_row(const std::vector<CsvCell>& cells);
  std::string str() const;

  /// Throws std::runtime_error on a ragged or empty table.
  static CsvTable parse(const std::string& text);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable read_csv(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace krein
