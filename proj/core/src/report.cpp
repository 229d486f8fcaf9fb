#include "wxdiag/report.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "wxdiag/error.hpp"

namespace wxdiag {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  // Avoid "-0" so sign-of-zero noise cannot differ between runs.
  if (value == 0.0) return "0";
  return fmt::format("{:.12g}", value);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != columns_.size()) {
    throw Error(ErrorKind::FormatError, fmt::format("row has {} cells, header has {}", row.size(), columns_.size()));
  }
  rows_.push_back(std::move(row));
}

namespace {

std::string render_cell(const CsvCell& cell) {
  struct Visitor {
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char c : s) {
        if (c == '"') out += '"';
        out += c;
      }
      return out + "\"";
    }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(long long i) const { return std::to_string(i); }
  };
  return std::visit(Visitor{}, cell);
}

}  // namespace

std::string CsvTable::render(std::uint64_t seed) const {
  std::string out = fmt::format("# seed={}\n", seed);
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out += ',';
    out += columns_[c];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += render_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write {}", tmp.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::IoError, fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table, std::uint64_t seed) {
  write_text(path, table.render(seed));
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

nlohmann::ordered_json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

}  // namespace wxdiag
