#include "wxdiag/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxdiag/error.hpp"

namespace wxdiag {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<char, 4> kMagic{'W', 'X', 'G', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::array<std::uint8_t, sizeof(T)> raw{};
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) throw Error(ErrorKind::FormatError, "WXG1 payload truncated");
  std::array<std::uint8_t, sizeof(T)> raw{};
  std::memcpy(raw.data(), bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  offset += sizeof(T);
  T value;
  std::memcpy(&value, raw.data(), sizeof(T));
  return value;
}

fs::path resolve(const fs::path& entry, const fs::path& manifest_dir,
                 const std::optional<fs::path>& data_root) {
  if (entry.is_absolute()) return entry;
  return (data_root ? *data_root : manifest_dir) / entry;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, fmt::format("malformed JSON in {}: {}", path.string(), e.what()));
  }
}

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

template <typename T>
T require(const json& obj, const char* key, const fs::path& where) {
  if (!obj.contains(key)) {
    throw Error(ErrorKind::ConfigError, fmt::format("{}: entry missing '{}'", where.string(), key));
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::ConfigError, fmt::format("{}: entry field '{}' has wrong type", where.string(), key));
  }
}

TimePoint manifest_time(const std::string& text, const fs::path& where) {
  try {
    return parse_iso8601(text);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, fmt::format("{}: {}", where.string(), e.what()));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_wxg1(const ScalarField& field, LatOrder order) {
  const auto& grid = field.grid();
  std::vector<std::uint8_t> out;
  out.reserve(12 + 8 * (grid.nlat() + grid.nlon() + grid.size()));
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.nlat()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.nlon()));
  const bool flip = order == LatOrder::descending;
  for (std::size_t r = 0; r < grid.nlat(); ++r) {
    put_le<double>(out, grid.lats()[flip ? grid.nlat() - 1 - r : r]);
  }
  for (double lon : grid.lons()) put_le<double>(out, lon);
  for (std::size_t r = 0; r < grid.nlat(); ++r) {
    const std::size_t i = flip ? grid.nlat() - 1 - r : r;
    for (std::size_t j = 0; j < grid.nlon(); ++j) put_le<double>(out, field.at(i, j));
  }
  return out;
}

DecodedField decode_wxg1(std::span<const std::uint8_t> bytes, FieldMeta meta) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorKind::FormatError, "missing WXG1 magic");
  }
  std::size_t offset = 4;
  const auto nlat = get_le<std::uint32_t>(bytes, offset);
  const auto nlon = get_le<std::uint32_t>(bytes, offset);
  const std::size_t expected = 12 + 8 * (std::size_t{nlat} + nlon + std::size_t{nlat} * nlon);
  if (bytes.size() != expected) {
    throw Error(ErrorKind::FormatError,
                fmt::format("WXG1 size {} does not match header ({} expected)", bytes.size(), expected));
  }
  std::vector<double> lats(nlat), lons(nlon), values(std::size_t{nlat} * nlon);
  for (auto& v : lats) v = get_le<double>(bytes, offset);
  for (auto& v : lons) v = get_le<double>(bytes, offset);
  for (auto& v : values) v = get_le<double>(bytes, offset);

  LatOrder order = LatOrder::ascending;
  if (nlat >= 2 && lats.front() > lats.back()) {
    order = LatOrder::descending;
    std::reverse(lats.begin(), lats.end());
    for (std::size_t r = 0; r < nlat / 2; ++r) {
      std::swap_ranges(values.begin() + static_cast<std::ptrdiff_t>(r * nlon),
                       values.begin() + static_cast<std::ptrdiff_t>((r + 1) * nlon),
                       values.begin() + static_cast<std::ptrdiff_t>((nlat - 1 - r) * nlon));
    }
  }
  auto grid = std::make_shared<const LatLonGrid>(std::move(lats), std::move(lons));
  return DecodedField{ScalarField(std::move(grid), std::move(values), std::move(meta)), order};
}

void write_wxg1(const fs::path& path, const ScalarField& field, LatOrder order) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const auto bytes = encode_wxg1(field, order);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "short write to " + path.string());
}

DecodedField read_wxg1(const fs::path& path, FieldMeta meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wxg1(bytes, std::move(meta));
}

Manifest read_manifest(const fs::path& path, const std::optional<fs::path>& data_root) {
  const json doc = read_json(path);
  const json* entries = nullptr;
  Manifest manifest;
  if (doc.is_array()) {
    entries = &doc;
  } else if (doc.is_object() && doc.contains("entries") && doc["entries"].is_array()) {
    entries = &doc["entries"];
    if (doc.contains("models")) {
      if (!doc["models"].is_object()) throw Error(ErrorKind::ConfigError, path.string() + ": 'models' must be an object");
      for (const auto& [name, info] : doc["models"].items()) {
        manifest.models[name] = ModelInfo{info.value("family", ""), info.value("loss", "")};
      }
    }
  } else {
    throw Error(ErrorKind::ConfigError, path.string() + ": manifest must be an array or have 'entries'");
  }
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  for (const auto& e : *entries) {
    if (!e.is_object()) throw Error(ErrorKind::ConfigError, path.string() + ": entry is not an object");
    ManifestEntry entry;
    entry.model = e.value("model", "");
    entry.variable = require<std::string>(e, "variable", path);
    entry.path = resolve(require<std::string>(e, "path", path), dir, data_root);
    if (e.contains("init_time")) {
      entry.init_time = manifest_time(require<std::string>(e, "init_time", path), path);
      entry.lead_hours = e.contains("lead_hours") ? require<int>(e, "lead_hours", path) : 0;
      if (entry.lead_hours < 0) throw Error(ErrorKind::ConfigError, path.string() + ": negative lead_hours");
    } else if (e.contains("valid_time")) {
      entry.valid_time = manifest_time(require<std::string>(e, "valid_time", path), path);
      entry.init_time = *entry.valid_time;
    } else {
      throw Error(ErrorKind::ConfigError, path.string() + ": entry needs init_time or valid_time");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  json doc;
  doc["models"] = json::object();
  for (const auto& [name, info] : manifest.models) {
    doc["models"][name] = {{"family", info.family}, {"loss", info.loss}};
  }
  doc["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    json row;
    if (!e.model.empty()) row["model"] = e.model;
    row["variable"] = e.variable;
    if (e.valid_time) {
      row["valid_time"] = format_iso8601(*e.valid_time);
    } else {
      row["init_time"] = format_iso8601(e.init_time);
      row["lead_hours"] = e.lead_hours;
    }
    row["path"] = e.path.generic_string();
    doc["entries"].push_back(std::move(row));
  }
  write_json(path, doc);
}

ForecastSet load_forecast_set(const fs::path& forecast_manifest, const fs::path& verification_manifest,
                              const std::optional<fs::path>& data_root) {
  ForecastSet set;
  const auto fc = read_manifest(forecast_manifest, data_root);
  for (const auto& [name, info] : fc.models) set.set_model_info(name, info);
  for (const auto& e : fc.entries) {
    if (e.model.empty()) throw Error(ErrorKind::ConfigError, "forecast entry without model");
    set.add_forecast(ForecastEntry{e.model, e.variable, e.init_time, e.lead_hours, e.path});
  }
  const auto ver = read_manifest(verification_manifest, data_root);
  for (const auto& e : ver.entries) {
    set.add_verification(VerificationEntry{e.variable, e.effective_valid_time(), e.path});
  }
  return set;
}

std::vector<ClimatologyManifestEntry> read_climatology_manifest(const fs::path& path,
                                                                const std::optional<fs::path>& data_root) {
  const json doc = read_json(path);
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw Error(ErrorKind::ConfigError, path.string() + ": climatology manifest needs 'entries'");
  }
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::vector<ClimatologyManifestEntry> out;
  for (const auto& e : doc["entries"]) {
    ClimatologyManifestEntry entry;
    entry.variable = require<std::string>(e, "variable", path);
    entry.doy = require<int>(e, "doy", path);
    entry.hour = e.contains("hour") ? require<int>(e, "hour", path) : kAnyHour;
    entry.mu = resolve(require<std::string>(e, "mu", path), dir, data_root);
    entry.sigma = resolve(require<std::string>(e, "sigma", path), dir, data_root);
    out.push_back(std::move(entry));
  }
  return out;
}

void write_climatology_manifest(const fs::path& path, std::span<const ClimatologyManifestEntry> entries) {
  json doc;
  doc["entries"] = json::array();
  for (const auto& e : entries) {
    doc["entries"].push_back({{"variable", e.variable},
                              {"doy", e.doy},
                              {"hour", e.hour},
                              {"mu", e.mu.generic_string()},
                              {"sigma", e.sigma.generic_string()}});
  }
  write_json(path, doc);
}

std::map<std::string, Climatology> load_climatologies(const fs::path& path,
                                                      const std::optional<fs::path>& data_root) {
  std::map<std::string, Climatology> out;
  for (const auto& e : read_climatology_manifest(path, data_root)) {
    auto mu = read_wxg1(e.mu).field;
    auto sigma = read_wxg1(e.sigma).field;
    if (!same_grid(mu.grid_ptr(), sigma.grid_ptr())) {
      throw Error(ErrorKind::GridMismatch, "climatology mu/sigma grids differ for " + e.variable);
    }
    auto it = out.find(e.variable);
    if (it == out.end()) it = out.emplace(e.variable, Climatology(mu.grid_ptr(), e.variable)).first;
    if (!same_grid(it->second.grid_ptr(), mu.grid_ptr())) {
      throw Error(ErrorKind::GridMismatch, "climatology slots on different grids for " + e.variable);
    }
    it->second.set_slot(e.doy, e.hour, {mu.values().begin(), mu.values().end()},
                        {sigma.values().begin(), sigma.values().end()});
  }
  return out;
}

}  // namespace wxdiag
