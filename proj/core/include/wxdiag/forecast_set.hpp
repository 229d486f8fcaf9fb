#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "wxdiag/timeutil.hpp"

namespace wxdiag {

/// Per-model tags used to group models (e.g. within-family error pairs).
struct ModelInfo {
  std::string family;
  std::string loss;
};

struct ForecastEntry {
  std::string model;
  std::string variable;
  TimePoint init_time{};
  int lead_hours = 0;
  std::filesystem::path path;

  TimePoint valid_time() const { return add_hours(init_time, lead_hours); }
};

struct VerificationEntry {
  std::string variable;
  TimePoint valid_time{};
  std::filesystem::path path;
};

/// Index of forecast and verification fields. Holds paths only; fields are
/// loaded on demand by the consumers. Iteration order is sorted by key so
/// every traversal is deterministic.
class ForecastSet {
 public:
  void add_forecast(ForecastEntry entry);
  void add_verification(VerificationEntry entry);
  void set_model_info(const std::string& model, ModelInfo info);

  const ForecastEntry* find_forecast(const std::string& model, const std::string& variable,
                                     TimePoint init, int lead_hours) const;
  const VerificationEntry* find_verification(const std::string& variable, TimePoint valid) const;
  const ModelInfo* model_info(const std::string& model) const;

  std::vector<ForecastEntry> forecasts() const;
  std::vector<VerificationEntry> verifications() const;
  std::vector<std::string> models() const;
  std::vector<std::string> variables() const;
  std::vector<TimePoint> init_times() const;
  std::vector<int> leads(const std::string& model) const;
  /// Leads present for every model.
  std::vector<int> common_leads() const;

  /// Human-readable invariant violations: forecasts without verification and
  /// models whose lead grids differ. Empty when the set is consistent.
  std::vector<std::string> check() const;

 private:
  using ForecastKey = std::tuple<std::string, std::string, TimePoint, int>;
  using VerificationKey = std::tuple<std::string, TimePoint>;

  std::map<ForecastKey, ForecastEntry> forecasts_;
  std::map<VerificationKey, VerificationEntry> verifications_;
  std::map<std::string, ModelInfo> model_info_;
};

}  // namespace wxdiag
