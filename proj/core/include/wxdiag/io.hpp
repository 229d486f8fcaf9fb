#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wxdiag/climatology.hpp"
#include "wxdiag/forecast_set.hpp"
#include "wxdiag/grid.hpp"

namespace wxdiag {

// WXG1 binary layout, all little-endian:
//   "WXG1" | u32 nlat | u32 nlon | f64 lats[nlat] | f64 lons[nlon] | f64 values[nlat*nlon]
// Values are row-major with latitude as the slow index.

enum class LatOrder { ascending, descending };

struct DecodedField {
  ScalarField field;   // always ascending latitudes
  LatOrder file_order;
};

std::vector<std::uint8_t> encode_wxg1(const ScalarField& field, LatOrder order = LatOrder::ascending);
DecodedField decode_wxg1(std::span<const std::uint8_t> bytes, FieldMeta meta = {});

void write_wxg1(const std::filesystem::path& path, const ScalarField& field,
                LatOrder order = LatOrder::ascending);
DecodedField read_wxg1(const std::filesystem::path& path, FieldMeta meta = {});

/// One manifest row. Verification manifests may carry `valid_time` instead of
/// init_time + lead_hours.
struct ManifestEntry {
  std::string model;
  std::string variable;
  TimePoint init_time{};
  int lead_hours = 0;
  std::optional<TimePoint> valid_time;
  std::filesystem::path path;

  TimePoint effective_valid_time() const {
    return valid_time ? *valid_time : add_hours(init_time, lead_hours);
  }
};

struct Manifest {
  std::map<std::string, ModelInfo> models;
  std::vector<ManifestEntry> entries;
};

/// Relative entry paths are resolved against `data_root` when given, else
/// against the manifest's own directory.
Manifest read_manifest(const std::filesystem::path& path,
                       const std::optional<std::filesystem::path>& data_root = std::nullopt);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

ForecastSet load_forecast_set(const std::filesystem::path& forecast_manifest,
                              const std::filesystem::path& verification_manifest,
                              const std::optional<std::filesystem::path>& data_root = std::nullopt);

/// Climatology manifest: {"entries": [{"variable", "doy", "hour", "mu", "sigma"}]}
/// where mu and sigma are WXG1 paths and hour -1 means "any hour".
struct ClimatologyManifestEntry {
  std::string variable;
  int doy = 1;
  int hour = kAnyHour;
  std::filesystem::path mu;
  std::filesystem::path sigma;
};

std::vector<ClimatologyManifestEntry> read_climatology_manifest(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& data_root = std::nullopt);
void write_climatology_manifest(const std::filesystem::path& path,
                                std::span<const ClimatologyManifestEntry> entries);

/// Loads every slot of every variable listed in the manifest.
std::map<std::string, Climatology> load_climatologies(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& data_root = std::nullopt);

}  // namespace wxdiag
