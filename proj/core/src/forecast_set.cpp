#include "wxdiag/forecast_set.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace wxdiag {

void ForecastSet::add_forecast(ForecastEntry entry) {
  ForecastKey key{entry.model, entry.variable, entry.init_time, entry.lead_hours};
  forecasts_.insert_or_assign(std::move(key), std::move(entry));
}

void ForecastSet::add_verification(VerificationEntry entry) {
  VerificationKey key{entry.variable, entry.valid_time};
  verifications_.insert_or_assign(std::move(key), std::move(entry));
}

void ForecastSet::set_model_info(const std::string& model, ModelInfo info) {
  model_info_.insert_or_assign(model, std::move(info));
}

const ForecastEntry* ForecastSet::find_forecast(const std::string& model, const std::string& variable,
                                                TimePoint init, int lead_hours) const {
  auto it = forecasts_.find(ForecastKey{model, variable, init, lead_hours});
  return it == forecasts_.end() ? nullptr : &it->second;
}

const VerificationEntry* ForecastSet::find_verification(const std::string& variable,
                                                        TimePoint valid) const {
  auto it = verifications_.find(VerificationKey{variable, valid});
  return it == verifications_.end() ? nullptr : &it->second;
}

const ModelInfo* ForecastSet::model_info(const std::string& model) const {
  auto it = model_info_.find(model);
  return it == model_info_.end() ? nullptr : &it->second;
}

std::vector<ForecastEntry> ForecastSet::forecasts() const {
  std::vector<ForecastEntry> out;
  out.reserve(forecasts_.size());
  for (const auto& [key, entry] : forecasts_) out.push_back(entry);
  return out;
}

std::vector<VerificationEntry> ForecastSet::verifications() const {
  std::vector<VerificationEntry> out;
  out.reserve(verifications_.size());
  for (const auto& [key, entry] : verifications_) out.push_back(entry);
  return out;
}

std::vector<std::string> ForecastSet::models() const {
  std::set<std::string> s;
  for (const auto& [key, e] : forecasts_) s.insert(e.model);
  return {s.begin(), s.end()};
}

std::vector<std::string> ForecastSet::variables() const {
  std::set<std::string> s;
  for (const auto& [key, e] : forecasts_) s.insert(e.variable);
  return {s.begin(), s.end()};
}

std::vector<TimePoint> ForecastSet::init_times() const {
  std::set<TimePoint> s;
  for (const auto& [key, e] : forecasts_) s.insert(e.init_time);
  return {s.begin(), s.end()};
}

std::vector<int> ForecastSet::leads(const std::string& model) const {
  std::set<int> s;
  for (const auto& [key, e] : forecasts_) {
    if (e.model == model) s.insert(e.lead_hours);
  }
  return {s.begin(), s.end()};
}

std::vector<int> ForecastSet::common_leads() const {
  const auto all_models = models();
  if (all_models.empty()) return {};
  std::vector<int> common = leads(all_models.front());
  for (std::size_t m = 1; m < all_models.size(); ++m) {
    const auto other = leads(all_models[m]);
    std::vector<int> next;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  return common;
}

std::vector<std::string> ForecastSet::check() const {
  std::vector<std::string> findings;
  for (const auto& [key, e] : forecasts_) {
    if (!find_verification(e.variable, e.valid_time())) {
      findings.push_back(fmt::format("missing verification for {} {} init {} lead {}h (valid {})",
                                     e.model, e.variable, format_iso8601(e.init_time),
                                     e.lead_hours, format_iso8601(e.valid_time())));
    }
  }
  const auto all_models = models();
  if (all_models.size() > 1) {
    const auto reference = leads(all_models.front());
    for (std::size_t m = 1; m < all_models.size(); ++m) {
      if (leads(all_models[m]) != reference) {
        findings.push_back(fmt::format("lead grid of model {} differs from model {}",
                                       all_models[m], all_models.front()));
      }
    }
  }
  return findings;
}

}  // namespace wxdiag
