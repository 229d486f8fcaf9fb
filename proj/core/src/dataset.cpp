// Synthetic end-to-end dataset: a drifting, nearly balanced "truth" and four
// models with different error growth, smoothing, wind drift and tail damping.

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxdiag/balance.hpp"
#include "wxdiag/dynamics.hpp"
#include "wxdiag/error.hpp"
#include "wxdiag/io.hpp"
#include "wxdiag/report.hpp"
#include "wxdiag/synth.hpp"

namespace wxdiag {

namespace {

namespace fs = std::filesystem;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kT2mSigma = 2.0;

struct ModelSpec {
  const char* name;
  const char* family;
  const char* loss;
  double growth;        // z500/t850 error e-folding rate, per day
  double smoothing;     // zonal 1-2-1 passes per forecast day
  double inflation;     // added small-scale energy per day (relative)
  double ke_drift;      // gamma, per day
  double ageostrophic;  // m/s of unbalanced wind noise
  double tail_alpha;    // warm-tail damping reached at day 5
};

constexpr ModelSpec kModels[] = {
    {"graph_crps", "graph", "crps", 0.36, 0.0, 0.0, -0.004, 1.5, 0.10},
    {"graph_mse", "graph", "mse", 0.40, 1.0, 0.0, -0.012, 1.0, 0.30},
    {"vit_mse", "transformer", "mse", 0.46, 0.6, 0.0, 0.002, 0.8, 0.44},
    {"vit_score", "transformer", "score", 0.42, 0.0, 0.35, 0.020, 2.5, 0.18},
};

constexpr const char* kVariables[] = {"t2m", "t850", "u500", "u850", "v500", "v850", "z500", "z850"};

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t v : {a, b, c}) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
  }
  return h;
}

std::vector<double> small_scales(const GridPtr& grid, double rms, double exponent, std::uint64_t seed) {
  const int k_max = static_cast<int>(std::max(grid->nlat(), grid->nlon()) / 2) - 2;
  auto recipe = power_law_recipe(exponent, k_max, 1.0, 2, seed);
  double total = 0.0;
  for (double e : recipe.energy) total += e;
  for (auto& e : recipe.energy) e *= rms * rms / total;
  auto f = field_with_spectrum(recipe, grid);
  return {f.values().begin(), f.values().end()};
}

void smooth_zonal(const LatLonGrid& grid, std::vector<double>& v, double passes) {
  const int whole = static_cast<int>(passes);
  const double frac = passes - whole;
  const std::size_t nlon = grid.nlon();
  auto pass = [&](double weight) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < grid.nlat(); ++i) {
      for (std::size_t j = 0; j < nlon; ++j) {
        const double l = v[grid.index(i, (j + nlon - 1) % nlon)];
        const double c = v[grid.index(i, j)];
        const double r = v[grid.index(i, (j + 1) % nlon)];
        out[grid.index(i, j)] = (1.0 - weight) * c + weight * (0.25 * l + 0.5 * c + 0.25 * r);
      }
    }
    v.swap(out);
  };
  for (int p = 0; p < whole; ++p) pass(1.0);
  if (frac > 0.0) pass(frac);
}

struct State {
  std::vector<double> z500, z850, t850, t2m, u500, v500, u850, v850;
  std::vector<double> t2m_delta;  // standardised t2m anomaly
};

double z500_clim(double phi) { return 5600.0 - 350.0 * std::sin(phi) * std::sin(phi); }
double t850_clim(double phi) { return 255.0 + 30.0 * std::cos(phi) * std::cos(phi); }
double t2m_clim(double phi) { return 268.0 + 30.0 * std::cos(phi) * std::cos(phi); }

std::vector<double> geostrophic_component(const GridPtr& grid, const std::vector<double>& z, bool u,
                                          const PhysicalConstants& c) {
  auto w = geostrophic_wind(ScalarField(grid, z), c);
  return u ? std::move(w.u) : std::move(w.v);
}

State truth_state(const GridPtr& grid, double hours, std::uint64_t seed, const PhysicalConstants& c) {
  const std::size_t n = grid->size();
  const double days = hours / 24.0;
  const auto hour_key = static_cast<std::uint64_t>(std::llround(hours));
  const auto zs = small_scales(grid, 25.0, -3.0, mix(seed, 1, hour_key));
  const auto ts = small_scales(grid, 1.2, -3.0, mix(seed, 2, hour_key));
  State s;
  s.z500.resize(n);
  s.t850.resize(n);
  s.z850.resize(n);
  s.t2m.resize(n);
  s.t2m_delta.resize(n);
  std::mt19937_64 rng(mix(seed, 3, hour_key));
  std::student_t_distribution<double> tail(4.0);
  const double lnp = std::log(kLowerLevelHpa / kUpperLevelHpa);
  for (std::size_t i = 0; i < grid->nlat(); ++i) {
    const double phi = grid->lat_rad(i);
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    for (std::size_t j = 0; j < grid->nlon(); ++j) {
      const double lam = grid->lons()[j] * kDeg;
      const std::size_t p = grid->index(i, j);
      s.z500[p] = z500_clim(phi) + 60.0 * cphi * cphi * std::cos(3.0 * lam - 0.35 * days) +
                  25.0 * cphi * sphi * std::sin(5.0 * lam + 0.2 * days) + zs[p];
      s.t850[p] = t850_clim(phi) + 4.0 * cphi * std::cos(2.0 * lam - 0.7 - 0.25 * days) + ts[p];
      s.z850[p] = s.z500[p] - c.r_dry * s.t850[p] * lnp / c.gravity;
      s.t2m_delta[p] = tail(rng);
      s.t2m[p] = t2m_clim(phi) + kT2mSigma * s.t2m_delta[p];
    }
  }
  s.u500 = geostrophic_component(grid, s.z500, true, c);
  s.v500 = geostrophic_component(grid, s.z500, false, c);
  s.u850 = geostrophic_component(grid, s.z850, true, c);
  s.v850 = geostrophic_component(grid, s.z850, false, c);
  return s;
}

State forecast_state(const GridPtr& grid, const State& truth, const ModelSpec& m, std::size_t model_index,
                     std::size_t init_index, int lead_hours, std::uint64_t seed, const PhysicalConstants& c) {
  const std::size_t n = grid->size();
  const double days = lead_hours / 24.0;
  const auto lead_key = static_cast<std::uint64_t>(lead_hours);
  const double grow = std::exp(m.growth * days);
  // Shared error (same for every model at this init and lead) plus a model part.
  const auto z_shared = small_scales(grid, 4.0 * grow, -2.0, mix(seed, 10, init_index, lead_key));
  const auto z_own = small_scales(grid, 3.0 * grow, -2.0, mix(seed, 11 + model_index, init_index, lead_key));
  const auto t_shared = small_scales(grid, 0.25 * grow, -2.0, mix(seed, 20, init_index, lead_key));
  const auto t_own = small_scales(grid, 0.2 * grow, -2.0, mix(seed, 21 + model_index, init_index, lead_key));
  std::vector<double> z_inflate(n, 0.0), t_inflate(n, 0.0);
  if (m.inflation > 0.0 && days > 0.0) {
    z_inflate = small_scales(grid, 18.0 * std::sqrt(m.inflation * days), -1.0, mix(seed, 30 + model_index, init_index, lead_key));
    t_inflate = small_scales(grid, 0.8 * std::sqrt(m.inflation * days), -1.0, mix(seed, 40 + model_index, init_index, lead_key));
  }

  State f;
  f.z500 = truth.z500;
  f.t850 = truth.t850;
  for (std::size_t p = 0; p < n; ++p) {
    f.z500[p] += z_shared[p] + z_own[p];
    f.t850[p] += t_shared[p] + t_own[p];
  }
  // Blurring acts on the error too, as it does for models trained on MSE.
  smooth_zonal(*grid, f.z500, m.smoothing * days);
  smooth_zonal(*grid, f.t850, m.smoothing * days);
  f.z850.resize(n);
  std::mt19937_64 rng(mix(seed, 50 + model_index, init_index, lead_key));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double lnp = std::log(kLowerLevelHpa / kUpperLevelHpa);
  for (std::size_t p = 0; p < n; ++p) {
    f.z500[p] += z_inflate[p];
    f.t850[p] += t_inflate[p];
    f.z850[p] = f.z500[p] - c.r_dry * f.t850[p] * lnp / c.gravity + 1.5 * normal(rng);
  }
  f.u500 = geostrophic_component(grid, f.z500, true, c);
  f.v500 = geostrophic_component(grid, f.z500, false, c);
  f.u850 = geostrophic_component(grid, f.z850, true, c);
  f.v850 = geostrophic_component(grid, f.z850, false, c);
  // Error growth alone would inflate kinetic energy; pin it to the truth's
  // level times the planted drift.
  const double drift = std::exp(m.ke_drift * days);
  const auto ke = [&](const std::vector<double>& u, const std::vector<double>& v) {
    return kinetic_energy(ScalarField(grid, u), ScalarField(grid, v));
  };
  for (auto [u, v, tu, tv] : {std::tuple{&f.u500, &f.v500, &truth.u500, &truth.v500},
                              std::tuple{&f.u850, &f.v850, &truth.u850, &truth.v850}}) {
    const double scale = std::sqrt(drift * ke(*tu, *tv) / ke(*u, *v));
    for (auto* w : {u, v}) {
      for (auto& x : *w) x = scale * x + m.ageostrophic * normal(rng);
    }
  }
  f.t2m.resize(n);
  const double alpha = m.tail_alpha * std::min(1.0, days / 5.0);
  const double t2m_noise = 0.3 + 0.1 * days;
  for (std::size_t p = 0; p < n; ++p) {
    const double damp = alpha * kT2mSigma * std::max(0.0, truth.t2m_delta[p] - 2.0);
    f.t2m[p] = truth.t2m[p] - damp + t2m_noise * normal(rng);
  }
  return f;
}

const std::vector<double>& pick(const State& s, std::string_view var) {
  if (var == "z500") return s.z500;
  if (var == "z850") return s.z850;
  if (var == "t850") return s.t850;
  if (var == "t2m") return s.t2m;
  if (var == "u500") return s.u500;
  if (var == "v500") return s.v500;
  if (var == "u850") return s.u850;
  return s.v850;
}

std::string stamp(TimePoint t) {
  auto s = format_iso8601(t);
  std::string out;
  for (char ch : s) {
    if (ch != '-' && ch != ':') out += ch;
  }
  return out;
}

}  // namespace

fs::path write_synthetic_dataset(const fs::path& dir, const SyntheticDatasetOptions& options) {
  if (options.inits == 0 || options.lead_step_hours <= 0 || options.max_lead_hours < 0) {
    throw Error(ErrorKind::ConfigError, "synthetic dataset needs inits and a positive lead step");
  }
  fs::create_directories(dir);
  const auto grid = std::make_shared<const LatLonGrid>(LatLonGrid::regular(options.nlat, options.nlon));
  const PhysicalConstants c;
  const TimePoint start = parse_iso8601("2021-07-01T00:00Z");
  std::vector<int> leads;
  for (int h = 0; h <= options.max_lead_hours; h += options.lead_step_hours) leads.push_back(h);

  Manifest forecasts;
  for (const auto& m : kModels) forecasts.models[m.name] = ModelInfo{m.family, m.loss};
  Manifest verification;
  std::map<int, State> truths;  // keyed by hours since start
  auto truth_at = [&](int hours) -> const State& {
    auto it = truths.find(hours);
    if (it == truths.end()) it = truths.emplace(hours, truth_state(grid, hours, options.seed, c)).first;
    return it->second;
  };

  for (std::size_t ii = 0; ii < options.inits; ++ii) {
    const int init_offset = static_cast<int>(ii) * 24;
    const TimePoint init = add_hours(start, init_offset);
    for (int lead : leads) {
      const State& truth = truth_at(init_offset + lead);
      for (std::size_t mi = 0; mi < std::size(kModels); ++mi) {
        const auto& m = kModels[mi];
        const State f = forecast_state(grid, truth, m, mi, ii, lead, options.seed, c);
        for (const char* var : kVariables) {
          const fs::path rel = fs::path("forecasts") / m.name / var / fmt::format("{}_{:03}h.wxg1", stamp(init), lead);
          FieldMeta meta{var, m.name, init, lead};
          write_wxg1(dir / rel, ScalarField(grid, pick(f, var), meta));
          forecasts.entries.push_back(ManifestEntry{m.name, var, init, lead, std::nullopt, rel});
        }
      }
    }
  }

  std::set<int> doys;
  for (const auto& [hours, state] : truths) {
    const TimePoint valid = add_hours(start, hours);
    doys.insert(day_of_year(valid));
    for (const char* var : kVariables) {
      const fs::path rel = fs::path("verification") / var / fmt::format("{}.wxg1", stamp(valid));
      write_wxg1(dir / rel, ScalarField(grid, pick(state, var), FieldMeta{var, "verification", valid, 0}));
      verification.entries.push_back(ManifestEntry{"", var, valid, 0, valid, rel});
    }
  }

  // Climatology: the unperturbed zonal state with fixed spreads.
  std::vector<ClimatologyManifestEntry> clim_entries;
  const double lnp = std::log(kLowerLevelHpa / kUpperLevelHpa);
  for (const char* var : kVariables) {
    std::vector<double> mu(grid->size()), sigma(grid->size());
    for (std::size_t i = 0; i < grid->nlat(); ++i) {
      const double phi = grid->lat_rad(i);
      for (std::size_t j = 0; j < grid->nlon(); ++j) {
        const std::size_t p = grid->index(i, j);
        const std::string_view v = var;
        if (v == "z500") {
          mu[p] = z500_clim(phi), sigma[p] = 60.0;
        } else if (v == "z850") {
          mu[p] = z500_clim(phi) - c.r_dry * t850_clim(phi) * lnp / c.gravity, sigma[p] = 50.0;
        } else if (v == "t850") {
          mu[p] = t850_clim(phi), sigma[p] = 3.0;
        } else if (v == "t2m") {
          mu[p] = t2m_clim(phi), sigma[p] = kT2mSigma;
        } else {
          mu[p] = 0.0, sigma[p] = 10.0;
        }
      }
    }
    const fs::path mu_rel = fs::path("climatology") / var / "mu.wxg1";
    const fs::path sd_rel = fs::path("climatology") / var / "sigma.wxg1";
    write_wxg1(dir / mu_rel, ScalarField(grid, std::move(mu)));
    write_wxg1(dir / sd_rel, ScalarField(grid, std::move(sigma)));
    for (int doy : doys) clim_entries.push_back({var, doy, kAnyHour, mu_rel, sd_rel});
  }

  write_manifest(dir / "forecasts.json", forecasts);
  write_manifest(dir / "verification.json", verification);
  write_climatology_manifest(dir / "climatology.json", clim_entries);

  nlohmann::ordered_json cfg;
  cfg["forecast_manifest"] = "forecasts.json";
  cfg["verification_manifest"] = "verification.json";
  cfg["climatology_manifest"] = "climatology.json";
  cfg["output_dir"] = "out";
  cfg["seed"] = options.seed;
  cfg["workers"] = 1;
  const int sfs_lead = options.max_lead_hours;
  cfg["sfs"] = {
      {"variable", "z500"},
      {"lead_hours", sfs_lead},
      {"pipelines",
       {
           {{"name", "mse_narrow"}, {"loss", "mse"}, {"h_ks", 0.6}, {"i0", 8.0},
            {"train_range", {{"t2m", {250.0, 300.0}}, {"z500", {5200.0, 5700.0}}}}},
           {{"name", "crps_wide"}, {"loss", "crps"}, {"h_ks", 0.6}, {"i0", 8.0},
            {"train_range", {{"t2m", {230.0, 320.0}}, {"z500", {5000.0, 5900.0}}}}},
           {{"name", "score_wide"}, {"loss", "score"}, {"h_ks", 0.6}, {"i0", 4.0},
            {"train_range", {{"t2m", {230.0, 320.0}}, {"z500", {5000.0, 5900.0}}}}},
       }},
  };
  const fs::path config_path = dir / "config.json";
  write_json(config_path, cfg);
  return config_path;
}

}  // namespace wxdiag
