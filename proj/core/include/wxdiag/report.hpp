#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace wxdiag {

/// Fixed-format rendering shared by every report: "{:.12g}", with "nan",
/// "inf" and "-inf" for non-finite values.
std::string format_number(double value);

using CsvCell = std::variant<std::string, double, long long>;

/// In-memory CSV table; rows keep insertion order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  /// Throws FormatError when the row width differs from the header.
  void add_row(std::vector<CsvCell> row);

  std::size_t rows() const noexcept { return rows_.size(); }
  /// Text with a leading "# seed=<seed>" line, a header row, then data rows.
  std::string render(std::uint64_t seed) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<CsvCell>> rows_;
};

/// Writes through a temporary file so partial reports never appear.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table, std::uint64_t seed);
/// Two-space indented JSON with non-finite numbers written as null.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

/// JSON number for finite values, null otherwise.
nlohmann::ordered_json json_number(double value);

}  // namespace wxdiag
