#include "wxdiag/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxdiag/consensus.hpp"
#include "wxdiag/dynamics.hpp"
#include "wxdiag/error.hpp"
#include "wxdiag/io.hpp"
#include "wxdiag/report.hpp"
#include "wxdiag/skill.hpp"
#include "wxdiag/spectral.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<Stage, 8> kAllStages{Stage::spectra,  Stage::skill,    Stage::consensus, Stage::dynamics,
                                          Stage::balance,  Stage::extremes, Stage::hmas,      Stage::sfs};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::spectra: return "spectra";
    case Stage::skill: return "skill";
    case Stage::consensus: return "consensus";
    case Stage::dynamics: return "dynamics";
    case Stage::balance: return "balance";
    case Stage::extremes: return "extremes";
    case Stage::hmas: return "hmas";
    case Stage::sfs: return "sfs";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::ConfigError, fmt::format("unknown stage '{}'", name));
}

std::set<Stage> default_stages() {
  return {Stage::spectra, Stage::skill, Stage::consensus, Stage::dynamics,
          Stage::balance, Stage::extremes, Stage::hmas};
}

// ---------------------------------------------------------------------------
// Config

namespace {

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc[key].is_null()) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, fmt::format("config key '{}': {}", key, e.what()));
  }
}

fs::path resolve_path(const std::string& p, const fs::path& base) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

WeightScheme parse_scheme(const json& j) {
  WeightScheme s;
  s.name = get_or<std::string>(j, "name", "");
  const auto w = get_or<std::vector<double>>(j, "weights", {});
  if (s.name.empty() || w.size() != kHmasMetrics) {
    throw Error(ErrorKind::ConfigError, "a weight scheme needs a name and six weights");
  }
  std::copy(w.begin(), w.end(), s.weights.begin());
  validate(s);
  return s;
}

SfsConfig parse_sfs(const json& j) {
  SfsConfig c;
  c.variable = get_or<std::string>(j, "variable", c.variable);
  c.lead_hours = get_or<int>(j, "lead_hours", c.lead_hours);
  if (j.contains("weights")) {
    const auto w = j["weights"].get<std::vector<double>>();
    if (w.size() != 3) throw Error(ErrorKind::ConfigError, "sfs weights need three entries");
    c.weights = {w[0], w[1], w[2]};
  }
  for (const auto& p : get_or<json>(j, "pipelines", json::array())) {
    SfsPipeline sp;
    sp.name = get_or<std::string>(p, "name", "");
    if (sp.name.empty()) throw Error(ErrorKind::ConfigError, "sfs pipeline without a name");
    sp.loss = parse_loss_family(get_or<std::string>(p, "loss", "mse"));
    sp.h_ks = get_or<double>(p, "h_ks", 0.0);
    sp.i0 = get_or<double>(p, "i0", 1.0);
    const auto ranges = get_or<json>(p, "train_range", json::object());
    for (const auto& [var, range] : ranges.items()) {
      const auto r = range.get<std::vector<double>>();
      if (r.size() != 2 || r[0] > r[1]) throw Error(ErrorKind::ConfigError, fmt::format("bad train_range for {}", var));
      sp.train_range[var] = {r[0], r[1]};
    }
    c.pipelines.push_back(std::move(sp));
  }
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  RunConfig c;
  const auto fc = get_or<std::string>(doc, "forecast_manifest", "");
  const auto ver = get_or<std::string>(doc, "verification_manifest", "");
  if (fc.empty() || ver.empty()) {
    throw Error(ErrorKind::ConfigError, "config needs forecast_manifest and verification_manifest");
  }
  c.forecast_manifest = resolve_path(fc, base_dir);
  c.verification_manifest = resolve_path(ver, base_dir);
  if (const auto clim = get_or<std::string>(doc, "climatology_manifest", ""); !clim.empty()) {
    c.climatology_manifest = resolve_path(clim, base_dir);
  }
  if (const auto root = get_or<std::string>(doc, "data_root", ""); !root.empty()) {
    c.data_root = resolve_path(root, base_dir);
  }
  c.output_dir = resolve_path(get_or<std::string>(doc, "output_dir", "wxdiag-out"), base_dir);
  c.variables = get_or<std::vector<std::string>>(doc, "variables", {});
  c.models = get_or<std::vector<std::string>>(doc, "models", {});
  c.leads = get_or<std::vector<int>>(doc, "leads", {});
  if (doc.contains("stages")) {
    c.stages.clear();
    for (const auto& s : doc["stages"].get<std::vector<std::string>>()) c.stages.insert(parse_stage(s));
  }
  const auto workers = get_or<long long>(doc, "workers", 1);
  if (workers < 1) throw Error(ErrorKind::ConfigError, "workers must be at least 1");
  c.workers = static_cast<std::size_t>(workers);
  c.seed = get_or<std::uint64_t>(doc, "seed", 0);
  c.spectral_variable = get_or<std::string>(doc, "spectral_variable", c.spectral_variable);
  c.growth_variable = get_or<std::string>(doc, "growth_variable", c.growth_variable);
  c.extremes_variable = get_or<std::string>(doc, "extremes_variable", c.extremes_variable);
  c.ke_level = get_or<std::string>(doc, "ke_level", c.ke_level);
  c.hmas_leads = get_or<std::vector<int>>(doc, "hmas_leads", {});
  c.lyapunov_day_lo = get_or<double>(doc, "lyapunov_day_lo", c.lyapunov_day_lo);
  c.lyapunov_day_hi = get_or<double>(doc, "lyapunov_day_hi", c.lyapunov_day_hi);
  if (doc.contains("asi_window_days")) c.asi_window_days = get_or<double>(doc, "asi_window_days", 0.0);
  if (doc.contains("tail")) {
    const auto& t = doc["tail"];
    c.tail.threshold_sigmas = get_or<double>(t, "threshold_sigmas", c.tail.threshold_sigmas);
    c.tail.bin_width = get_or<double>(t, "bin_width", c.tail.bin_width);
    c.tail.bin_lo = get_or<double>(t, "bin_lo", c.tail.bin_lo);
    c.tail.bin_hi = get_or<double>(t, "bin_hi", c.tail.bin_hi);
    c.tail.fit_lo = get_or<double>(t, "fit_lo", c.tail.fit_lo);
    c.tail.fit_hi = get_or<double>(t, "fit_hi", c.tail.fit_hi);
    const auto tail = get_or<std::string>(t, "tail", "warm");
    if (tail != "warm" && tail != "cold") throw Error(ErrorKind::ConfigError, "tail must be warm or cold");
    c.tail.tail = tail == "warm" ? Tail::warm : Tail::cold;
  }
  if (doc.contains("normalizers")) {
    const auto& n = doc["normalizers"];
    c.normalizers.agr_max = get_or<double>(n, "agr_max", c.normalizers.agr_max);
    c.normalizers.ndr_max = get_or<double>(n, "ndr_max", c.normalizers.ndr_max);
    c.normalizers.thermal_max = get_or<double>(n, "thermal_max", c.normalizers.thermal_max);
    c.normalizers.hydro_max = get_or<double>(n, "hydro_max", c.normalizers.hydro_max);
    for (double v : {c.normalizers.agr_max, c.normalizers.ndr_max, c.normalizers.thermal_max, c.normalizers.hydro_max}) {
      if (!(v > 0.0)) throw Error(ErrorKind::ConfigError, "balance normalizers must be positive");
    }
  }
  if (doc.contains("midlatitudes")) {
    const auto band = doc["midlatitudes"].get<std::vector<double>>();
    if (band.size() != 2 || !(band[0] < band[1])) throw Error(ErrorKind::ConfigError, "midlatitudes needs [lo, hi]");
    c.constants.mid_lat_lo = band[0];
    c.constants.mid_lat_hi = band[1];
  }
  if (doc.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : doc["schemes"]) c.schemes.push_back(parse_scheme(s));
  }
  if (doc.contains("sfs")) c.sfs = parse_sfs(doc["sfs"]);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, fmt::format("cannot read config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

// ---------------------------------------------------------------------------
// Shared machinery

namespace {

std::optional<fs::path> effective_data_root(const RunConfig& c) {
  if (const char* env = std::getenv("WXDIAG_DATA_DIR"); env && *env) return fs::path(env);
  return c.data_root;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index owns its
/// output slot, so results do not depend on scheduling.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean_or_nan(const std::vector<double>& v) { return v.empty() ? kNaN : mean(v); }

double ci_or_nan(const std::vector<double>& v) {
  return v.size() < 2 ? kNaN : confidence_interval(v).half_width;
}

std::string lead_tag(int lead) { return fmt::format("{}h", lead); }

struct Context {
  const RunConfig& cfg;
  ForecastSet set;
  std::map<std::string, Climatology> clims;
  std::vector<std::string> models;
  std::vector<std::string> variables;
  std::vector<TimePoint> inits;
  std::vector<int> leads;
  std::vector<std::string> issues;

  explicit Context(const RunConfig& c) : cfg(c) {}

  std::optional<ScalarField> forecast(const std::string& model, const std::string& var, TimePoint init,
                                      int lead) const {
    const auto* e = set.find_forecast(model, var, init, lead);
    if (!e) return std::nullopt;
    return read_wxg1(e->path, FieldMeta{var, model, init, lead}).field;
  }

  std::optional<ScalarField> truth(const std::string& var, TimePoint valid) const {
    const auto* e = set.find_verification(var, valid);
    if (!e) return std::nullopt;
    return read_wxg1(e->path, FieldMeta{var, "verification", valid, 0}).field;
  }

  const Climatology* climatology(const std::string& var) const {
    auto it = clims.find(var);
    return it == clims.end() ? nullptr : &it->second;
  }

  bool has_variable(const std::string& var) const {
    const auto all = set.variables();
    return std::find(all.begin(), all.end(), var) != all.end();
  }
};

std::string cell_name(const std::string& model, const std::string& var, TimePoint init, int lead) {
  return fmt::format("{} {} init {} +{}h", model, var, format_iso8601(init), lead);
}

/// Reads the forecast and verification of one cell; a missing field becomes
/// an issue string and an empty result.
struct Pair {
  std::optional<ScalarField> forecast;
  std::optional<ScalarField> truth;
};

Pair load_pair(const Context& ctx, const std::string& model, const std::string& var, TimePoint init, int lead,
               std::string& issue) {
  Pair p;
  p.forecast = ctx.forecast(model, var, init, lead);
  if (!p.forecast) {
    issue = fmt::format("{}: missing forecast", cell_name(model, var, init, lead));
    return p;
  }
  p.truth = ctx.truth(var, add_hours(init, lead));
  if (!p.truth) issue = fmt::format("{}: missing verification", cell_name(model, var, init, lead));
  return p;
}

// ---------------------------------------------------------------------------
// Spectra

struct SpectralEntry {
  Spectrum forecast;
  Spectrum truth;
  double sfi = kNaN;
  EffectiveResolution l_eff;
  std::size_t n = 0;
};

using SpectralKey = std::tuple<std::string, std::string, int>;  // variable, model, lead

std::map<SpectralKey, SpectralEntry> compute_spectra(Context& ctx, const std::vector<std::string>& vars) {
  struct Cell {
    std::string var, model;
    std::size_t init;
    int lead;
    std::optional<Spectrum> f, t;
    std::string issue;
  };
  std::vector<Cell> cells;
  for (const auto& var : vars)
    for (const auto& m : ctx.models)
      for (int lead : ctx.leads)
        for (std::size_t ii = 0; ii < ctx.inits.size(); ++ii) cells.push_back({var, m, ii, lead, {}, {}, {}});

  parallel_for(cells.size(), ctx.cfg.workers, [&](std::size_t i) {
    auto& c = cells[i];
    try {
      auto p = load_pair(ctx, c.model, c.var, ctx.inits[c.init], c.lead, c.issue);
      if (!p.truth) return;
      c.f = isotropic_spectrum(*p.forecast);
      c.t = isotropic_spectrum(*p.truth);
    } catch (const Error& e) {
      c.issue = fmt::format("{}: {}", cell_name(c.model, c.var, ctx.inits[c.init], c.lead), e.what());
    }
  });

  std::map<SpectralKey, std::pair<std::vector<Spectrum>, std::vector<Spectrum>>> groups;
  for (auto& c : cells) {
    if (!c.issue.empty()) ctx.issues.push_back(c.issue);
    if (!c.f) continue;
    auto& g = groups[{c.var, c.model, c.lead}];
    g.first.push_back(std::move(*c.f));
    g.second.push_back(std::move(*c.t));
  }
  std::map<SpectralKey, SpectralEntry> out;
  for (auto& [key, g] : groups) {
    SpectralEntry e{mean_spectrum(g.first), mean_spectrum(g.second), kNaN, {}, g.first.size()};
    try {
      e.sfi = sfi(e.forecast, e.truth);
    } catch (const Error& err) {
      ctx.issues.push_back(fmt::format("{} {} +{}h: {}", std::get<1>(key), std::get<0>(key), std::get<2>(key), err.what()));
    }
    e.l_eff = effective_resolution(e.forecast, e.truth);
    out.emplace(key, std::move(e));
  }
  return out;
}

void write_spectra(const Context& ctx, const std::map<SpectralKey, SpectralEntry>& spectra, RunSummary& summary) {
  CsvTable energy({"variable", "model", "lead_hours", "k", "energy"});
  CsvTable ratios({"variable", "model", "lead_hours", "k", "ratio"});
  CsvTable metrics({"variable", "model", "lead_hours", "sfi", "l_eff_k", "l_eff_norm", "n"});
  // Verification spectra are written once per (variable, lead), from the
  // first model's matching valid times.
  std::set<std::pair<std::string, int>> truth_written;
  for (const auto& [key, e] : spectra) {
    const auto& [var, model, lead] = key;
    if (truth_written.insert({var, lead}).second) {
      for (int k = 1; k <= e.truth.k_max(); ++k) {
        energy.add_row({var, std::string("verification"), static_cast<long long>(lead), static_cast<long long>(k),
                        e.truth.energy(k)});
      }
    }
    for (int k = 1; k <= e.forecast.k_max(); ++k) {
      energy.add_row({var, model, static_cast<long long>(lead), static_cast<long long>(k), e.forecast.energy(k)});
    }
    const auto r = spectral_ratio(e.forecast, e.truth);
    for (std::size_t i = 0; i < r.wavenumbers.size(); ++i) {
      ratios.add_row({var, model, static_cast<long long>(lead), static_cast<long long>(r.wavenumbers[i]), r.ratio[i]});
    }
    metrics.add_row({var, model, static_cast<long long>(lead), e.sfi, static_cast<long long>(e.l_eff.wavenumber),
                     e.l_eff.normalized, static_cast<long long>(e.n)});
  }
  const auto& dir = ctx.cfg.output_dir;
  write_csv(dir / "spectra.csv", energy, ctx.cfg.seed);
  write_csv(dir / "ratios.csv", ratios, ctx.cfg.seed);
  write_csv(dir / "spectral_metrics.csv", metrics, ctx.cfg.seed);
  summary.outputs.insert(summary.outputs.end(),
                         {dir / "spectra.csv", dir / "ratios.csv", dir / "spectral_metrics.csv"});
}

// ---------------------------------------------------------------------------
// Skill

constexpr std::array<const char*, 5> kSkillMetrics{"rmse", "acc", "rmse_tropics", "rmse_extratropics",
                                                  "rmse_polar"};

struct SkillEntry {
  std::array<std::vector<double>, kSkillMetrics.size()> samples;
};

using SkillKey = std::tuple<std::string, std::string, int>;  // variable, model, lead

std::map<SkillKey, SkillEntry> compute_skill(Context& ctx, const std::vector<std::string>& vars) {
  struct Cell {
    std::string var, model;
    std::size_t init;
    int lead;
    std::array<double, kSkillMetrics.size()> values;
    bool ok = false;
    std::string issue;
  };
  std::vector<Cell> cells;
  for (const auto& var : vars)
    for (const auto& m : ctx.models)
      for (int lead : ctx.leads)
        for (std::size_t ii = 0; ii < ctx.inits.size(); ++ii) cells.push_back({var, m, ii, lead, {}, false, {}});

  parallel_for(cells.size(), ctx.cfg.workers, [&](std::size_t i) {
    auto& c = cells[i];
    c.values.fill(kNaN);
    try {
      auto p = load_pair(ctx, c.model, c.var, ctx.inits[c.init], c.lead, c.issue);
      if (!p.truth) return;
      c.values[0] = rmse(*p.forecast, *p.truth);
      if (const auto* clim = ctx.climatology(c.var); clim && clim->covers(p.truth->meta().valid_time())) {
        try {
          c.values[1] = acc(*p.forecast, *p.truth, *clim);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateAnomaly) throw;
        }
      }
      const auto bands = regional_errors(*p.forecast, *p.truth);
      for (std::size_t b = 0; b < bands.size(); ++b) c.values[2 + b] = bands[b].rmse;
      c.ok = true;
    } catch (const Error& e) {
      c.issue = fmt::format("{}: {}", cell_name(c.model, c.var, ctx.inits[c.init], c.lead), e.what());
    }
  });

  std::map<SkillKey, SkillEntry> out;
  for (const auto& c : cells) {
    if (!c.issue.empty()) ctx.issues.push_back(c.issue);
    if (!c.ok) continue;
    auto& e = out[{c.var, c.model, c.lead}];
    for (std::size_t m = 0; m < kSkillMetrics.size(); ++m) {
      if (!std::isnan(c.values[m])) e.samples[m].push_back(c.values[m]);
    }
  }
  return out;
}

void write_skill(const Context& ctx, const std::map<SkillKey, SkillEntry>& skill, RunSummary& summary) {
  CsvTable table({"variable", "model", "lead_hours", "metric", "mean", "ci90", "n"});
  for (const auto& [key, e] : skill) {
    const auto& [var, model, lead] = key;
    for (std::size_t m = 0; m < kSkillMetrics.size(); ++m) {
      if (e.samples[m].empty()) continue;
      table.add_row({var, model, static_cast<long long>(lead), std::string(kSkillMetrics[m]), mean(e.samples[m]),
                     ci_or_nan(e.samples[m]), static_cast<long long>(e.samples[m].size())});
    }
  }
  const auto& dir = ctx.cfg.output_dir;
  write_csv(dir / "skill.csv", table, ctx.cfg.seed);

  ojson card;
  card["seed"] = ctx.cfg.seed;
  card["metric"] = "rmse";
  card["rank_order"] = "1 = lowest RMSE";
  card["variables"] = ojson::object();
  std::set<std::string> vars;
  for (const auto& [key, e] : skill) vars.insert(std::get<0>(key));
  for (const auto& var : vars) {
    std::vector<MetricSeries> series;
    for (const auto& model : ctx.models) {
      MetricSeries s{model, var, "rmse", ctx.leads, {}, {}, {}};
      for (int lead : ctx.leads) {
        auto it = skill.find({var, model, lead});
        s.mean.push_back(it != skill.end() && !it->second.samples[0].empty() ? mean(it->second.samples[0]) : kNaN);
      }
      series.push_back(std::move(s));
    }
    const auto sc = scorecard(series);
    ojson v;
    v["leads"] = sc.leads;
    v["models"] = sc.models;
    v["ranks"] = sc.ranks;
    card["variables"][var] = std::move(v);
  }
  write_json(dir / "scorecard.json", card);
  summary.outputs.insert(summary.outputs.end(), {dir / "skill.csv", dir / "scorecard.json"});
}

/// Mean RMSE per (model, lead) of one variable, reusing skill results.
std::map<std::pair<std::string, int>, double> rmse_by_lead(const std::map<SkillKey, SkillEntry>& skill,
                                                           const std::string& var) {
  std::map<std::pair<std::string, int>, double> out;
  for (const auto& [key, e] : skill) {
    if (std::get<0>(key) != var || e.samples[0].empty()) continue;
    out[{std::get<1>(key), std::get<2>(key)}] = mean(e.samples[0]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Consensus

struct ConsensusEntry {
  std::vector<double> ecr;
  std::vector<double> pairwise_r;
  std::map<PairGroup, std::map<int, std::vector<double>>> med;  // group -> k -> per-init values
};

using ConsensusKey = std::pair<std::string, int>;  // variable, lead

std::map<ConsensusKey, ConsensusEntry> compute_consensus(Context& ctx, const std::vector<std::string>& vars) {
  std::vector<std::string> families;
  for (const auto& m : ctx.models) {
    const auto* info = ctx.set.model_info(m);
    families.push_back(info && !info->family.empty() ? info->family : m);
  }
  constexpr std::array<PairGroup, 3> groups{PairGroup::all, PairGroup::within_family, PairGroup::cross_family};

  struct Cell {
    std::string var;
    int lead;
    std::size_t init;
    double ecr = kNaN, r = kNaN;
    std::map<PairGroup, MedCurve> med;
    std::string issue;
  };
  std::vector<Cell> cells;
  for (const auto& var : vars)
    for (int lead : ctx.leads)
      for (std::size_t ii = 0; ii < ctx.inits.size(); ++ii) cells.push_back({var, lead, ii, kNaN, kNaN, {}, {}});

  parallel_for(cells.size(), ctx.cfg.workers, [&](std::size_t i) {
    auto& c = cells[i];
    const TimePoint init = ctx.inits[c.init];
    try {
      const auto truth = ctx.truth(c.var, add_hours(init, c.lead));
      if (!truth) {
        c.issue = fmt::format("consensus {} init {} +{}h: missing verification", c.var, format_iso8601(init), c.lead);
        return;
      }
      std::vector<ScalarField> errors;
      for (const auto& m : ctx.models) {
        auto f = ctx.forecast(m, c.var, init, c.lead);
        if (!f) {
          c.issue = fmt::format("consensus {} init {} +{}h: {} missing", c.var, format_iso8601(init), c.lead, m);
          return;
        }
        errors.push_back(error_field(*f, *truth));
      }
      c.ecr = ecr(errors);
      c.r = pairwise_error_correlation(errors);
      for (PairGroup g : groups) {
        const auto pairs = select_pairs(families, g);
        if (!pairs.empty()) c.med[g] = med(errors, pairs);
      }
    } catch (const Error& e) {
      c.issue = fmt::format("consensus {} init {} +{}h: {}", c.var, format_iso8601(init), c.lead, e.what());
    }
  });

  std::map<ConsensusKey, ConsensusEntry> out;
  for (const auto& c : cells) {
    if (!c.issue.empty()) ctx.issues.push_back(c.issue);
    if (std::isnan(c.ecr)) continue;
    auto& e = out[{c.var, c.lead}];
    e.ecr.push_back(c.ecr);
    e.pairwise_r.push_back(c.r);
    for (const auto& [g, curve] : c.med) {
      for (std::size_t k = 0; k < curve.wavenumbers.size(); ++k) e.med[g][curve.wavenumbers[k]].push_back(curve.med[k]);
    }
  }
  return out;
}

void write_consensus(const Context& ctx, const std::map<ConsensusKey, ConsensusEntry>& cons, RunSummary& summary) {
  const auto& dir = ctx.cfg.output_dir;
  std::map<std::string, CsvTable> by_var;
  for (const auto& [key, e] : cons) {
    const auto& [var, lead] = key;
    auto [it, fresh] = by_var.try_emplace(var, std::vector<std::string>{"lead_hours", "ecr_mean", "ecr_ci",
                                                                        "pairwise_r_mean", "n"});
    it->second.add_row({static_cast<long long>(lead), mean(e.ecr), ci_or_nan(e.ecr), mean(e.pairwise_r),
                        static_cast<long long>(e.ecr.size())});
    CsvTable med_table({"k", "group", "med_mean"});
    for (const auto& [g, per_k] : e.med) {
      for (const auto& [k, values] : per_k) {
        med_table.add_row({static_cast<long long>(k), std::string(to_string(g)), mean(values)});
      }
    }
    const auto path = dir / fmt::format("med_{}_{}.csv", var, lead_tag(lead));
    write_csv(path, med_table, ctx.cfg.seed);
    summary.outputs.push_back(path);
  }
  for (const auto& [var, table] : by_var) {
    const auto path = dir / fmt::format("consensus_{}.csv", var);
    write_csv(path, table, ctx.cfg.seed);
    summary.outputs.push_back(path);
  }
}

// ---------------------------------------------------------------------------
// Dynamics

struct DynamicsEntry {
  std::optional<GrowthFit> growth;
  std::optional<KeDrift> drift;
  std::vector<int> ke_leads;
  std::vector<double> ke_ratio;
};

double asi_window(const Context& ctx) {
  if (ctx.cfg.asi_window_days) return *ctx.cfg.asi_window_days;
  return ctx.leads.empty() ? 0.0 : ctx.leads.back() / 24.0;
}

std::map<std::string, DynamicsEntry> compute_dynamics(Context& ctx,
                                                      const std::map<std::pair<std::string, int>, double>& rmse) {
  const std::string uvar = "u" + ctx.cfg.ke_level;
  const std::string vvar = "v" + ctx.cfg.ke_level;
  struct Cell {
    std::string model;
    std::size_t init;
    std::vector<double> ratio;
    std::string issue;
  };
  std::vector<Cell> cells;
  for (const auto& m : ctx.models)
    for (std::size_t ii = 0; ii < ctx.inits.size(); ++ii) cells.push_back({m, ii, {}, {}});

  parallel_for(cells.size(), ctx.cfg.workers, [&](std::size_t i) {
    auto& c = cells[i];
    const TimePoint init = ctx.inits[c.init];
    try {
      std::vector<ScalarField> us, vs;
      for (int lead : ctx.leads) {
        auto u = ctx.forecast(c.model, uvar, init, lead);
        auto v = ctx.forecast(c.model, vvar, init, lead);
        if (!u || !v) {
          c.issue = fmt::format("{}: missing wind component", cell_name(c.model, uvar, init, lead));
          return;
        }
        us.push_back(std::move(*u));
        vs.push_back(std::move(*v));
      }
      c.ratio = ke_ratio_series(us, vs);
    } catch (const Error& e) {
      c.issue = fmt::format("dynamics {} init {}: {}", c.model, format_iso8601(init), e.what());
    }
  });

  std::map<std::string, DynamicsEntry> out;
  std::map<std::string, std::vector<std::vector<double>>> ratios;
  for (auto& c : cells) {
    if (!c.issue.empty()) ctx.issues.push_back(c.issue);
    if (!c.ratio.empty()) ratios[c.model].push_back(std::move(c.ratio));
  }
  const double window = asi_window(ctx);
  for (const auto& m : ctx.models) {
    DynamicsEntry e;
    std::vector<int> leads;
    std::vector<double> series;
    for (int lead : ctx.leads) {
      auto it = rmse.find({m, lead});
      if (it == rmse.end()) continue;
      leads.push_back(lead);
      series.push_back(it->second);
    }
    try {
      e.growth = fit_lyapunov(leads, series, ctx.cfg.lyapunov_day_lo, ctx.cfg.lyapunov_day_hi);
    } catch (const Error& err) {
      ctx.issues.push_back(fmt::format("dynamics {} growth fit: {}", m, err.what()));
    }
    if (auto it = ratios.find(m); it != ratios.end()) {
      e.ke_leads = ctx.leads;
      e.ke_ratio.assign(ctx.leads.size(), 0.0);
      for (const auto& r : it->second) {
        for (std::size_t l = 0; l < r.size(); ++l) e.ke_ratio[l] += r[l];
      }
      for (auto& x : e.ke_ratio) x /= static_cast<double>(it->second.size());
      try {
        e.drift = asi(e.ke_leads, e.ke_ratio, window);
      } catch (const Error& err) {
        ctx.issues.push_back(fmt::format("dynamics {} ASI: {}", m, err.what()));
      }
    }
    out.emplace(m, std::move(e));
  }
  return out;
}

void write_dynamics(const Context& ctx, const std::map<std::string, DynamicsEntry>& dyn, RunSummary& summary) {
  CsvTable table({"model", "lambda_eff", "tau_d_hours", "tau_d_norm", "fit_r2", "gamma", "window_days", "asi"});
  CsvTable ke({"model", "lead_hours", "ke_ratio"});
  for (const auto& [model, e] : dyn) {
    table.add_row({model, e.growth ? e.growth->lambda_eff : kNaN, e.growth ? e.growth->tau_d_hours : kNaN,
                   e.growth ? e.growth->tau_d_norm : kNaN, e.growth ? e.growth->r2 : kNaN,
                   e.drift ? e.drift->gamma : kNaN, e.drift ? e.drift->window_days : kNaN,
                   e.drift ? e.drift->asi : kNaN});
    for (std::size_t l = 0; l < e.ke_leads.size(); ++l) {
      ke.add_row({model, static_cast<long long>(e.ke_leads[l]), e.ke_ratio[l]});
    }
  }
  const auto& dir = ctx.cfg.output_dir;
  write_csv(dir / "dynamics.csv", table, ctx.cfg.seed);
  write_csv(dir / "ke_series.csv", ke, ctx.cfg.seed);
  summary.outputs.insert(summary.outputs.end(), {dir / "dynamics.csv", dir / "ke_series.csv"});
}

// ---------------------------------------------------------------------------
// Balance

struct BalanceEntry {
  std::vector<BalanceReport> reports;
};

using ModelLeadKey = std::pair<std::string, int>;

std::map<ModelLeadKey, BalanceEntry> compute_balance(Context& ctx) {
  struct Cell {
    std::string model;
    std::size_t init;
    int lead;
    std::optional<BalanceReport> report;
    std::string issue;
  };
  std::vector<Cell> cells;
  for (const auto& m : ctx.models)
    for (int lead : ctx.leads)
      for (std::size_t ii = 0; ii < ctx.inits.size(); ++ii) cells.push_back({m, ii, lead, {}, {}});

  parallel_for(cells.size(), ctx.cfg.workers, [&](std::size_t i) {
    auto& c = cells[i];
    const TimePoint init = ctx.inits[c.init];
    try {
      auto get = [&](const char* var) { return ctx.forecast(c.model, var, init, c.lead); };
      auto u500 = get("u500"), v500 = get("v500"), u850 = get("u850"), v850 = get("v850");
      auto z500 = get("z500"), z850 = get("z850"), t850 = get("t850"), t500 = get("t500");
      std::optional<ScalarField> t_layer = t850;
      if (t850 && t500) {
        std::vector<double> mid(t850->values().size());
        for (std::size_t p = 0; p < mid.size(); ++p) mid[p] = 0.5 * (t850->values()[p] + t500->values()[p]);
        t_layer = t850->with_values(std::move(mid));
      }
      BalanceFields f;
      f.u500 = u500 ? &*u500 : nullptr;
      f.v500 = v500 ? &*v500 : nullptr;
      f.u850 = u850 ? &*u850 : nullptr;
      f.v850 = v850 ? &*v850 : nullptr;
      f.z500 = z500 ? &*z500 : nullptr;
      f.z850 = z850 ? &*z850 : nullptr;
      f.t_layer = t_layer ? &*t_layer : nullptr;
      c.report = evaluate_balance(f, ctx.cfg.constants, ctx.cfg.normalizers);
    } catch (const Error& e) {
      c.issue = fmt::format("balance {} init {} +{}h: {}", c.model, format_iso8601(init), c.lead, e.what());
    }
  });

  std::map<ModelLeadKey, BalanceEntry> out;
  for (auto& c : cells) {
    if (!c.issue.empty()) ctx.issues.push_back(c.issue);
    if (c.report) out[{c.model, c.lead}].reports.push_back(*c.report);
  }
  return out;
}

struct BalanceMeans {
  double pcs_geo, pcs_ndiv, pcs_thermal, pcs_hydro, composite, agr, ndr, thermal, hydro;
};

BalanceMeans balance_means(const BalanceEntry& e) {
  BalanceMeans m{};
  const double n = static_cast<double>(e.reports.size());
  for (const auto& r : e.reports) {
    m.pcs_geo += r.geo.pcs / n;
    m.pcs_ndiv += r.ndiv.pcs / n;
    m.pcs_thermal += r.thermal.pcs / n;
    m.pcs_hydro += r.hydro.pcs / n;
    m.composite += r.composite / n;
    m.agr += r.geo.ratio / n;
    m.ndr += r.ndiv.ratio / n;
    m.thermal += r.thermal.ratio / n;
    m.hydro += r.hydro.ratio / n;
  }
  return m;
}

void write_balance(const Context& ctx, const std::map<ModelLeadKey, BalanceEntry>& bal, RunSummary& summary) {
  CsvTable table({"model", "lead_hours", "pcs_geo", "pcs_ndiv", "pcs_thermal", "pcs_hydro", "pcs_composite", "agr",
                  "ndr", "thermal_ratio", "hydro_rel_error", "n"});
  for (const auto& [key, e] : bal) {
    const auto m = balance_means(e);
    table.add_row({key.first, static_cast<long long>(key.second), m.pcs_geo, m.pcs_ndiv, m.pcs_thermal, m.pcs_hydro,
                   m.composite, m.agr, m.ndr, m.thermal, m.hydro, static_cast<long long>(e.reports.size())});
  }
  const auto path = ctx.cfg.output_dir / "balance.csv";
  write_csv(path, table, ctx.cfg.seed);
  summary.outputs.push_back(path);
}

// ---------------------------------------------------------------------------
// Extremes

struct ExtremesEntry {
  std::optional<TailCurve> curve;
  std::vector<double> ees;
  std::size_t points = 0;
};

std::map<ModelLeadKey, ExtremesEntry> compute_extremes(Context& ctx) {
  const std::string& var = ctx.cfg.extremes_variable;
  const Climatology* clim = ctx.climatology(var);
  std::map<ModelLeadKey, ExtremesEntry> out;
  if (!clim) {
    ctx.issues.push_back(fmt::format("extremes: no climatology for {}", var));
    return out;
  }
  struct Cell {
    std::string model;
    std::size_t init;
    int lead;
    double ees = kNaN;
    std::vector<std::pair<double, double>> samples;  // (delta, bias)
    bool ok = false;
    std::string issue;
  };
  std::vector<Cell> cells;
  for (const auto& m : ctx.models)
    for (int lead : ctx.leads)
      for (std::size_t ii = 0; ii < ctx.inits.size(); ++ii) cells.push_back({m, ii, lead, kNaN, {}, false, {}});

  const auto& opt = ctx.cfg.tail;
  parallel_for(cells.size(), ctx.cfg.workers, [&](std::size_t i) {
    auto& c = cells[i];
    try {
      auto p = load_pair(ctx, c.model, var, ctx.inits[c.init], c.lead, c.issue);
      if (!p.truth) return;
      const auto ex = exceedance_mask(*p.truth, *clim, opt.threshold_sigmas, opt.tail);
      c.ok = true;
      if (ex.count == 0) return;
      c.ees = ees(*p.forecast, *p.truth, *clim, opt.threshold_sigmas, opt.tail);
      const double s = opt.tail == Tail::warm ? 1.0 : -1.0;
      for (std::size_t q = 0; q < ex.mask.size(); ++q) {
        if (ex.mask[q]) c.samples.emplace_back(ex.delta[q], s * (p.forecast->values()[q] - p.truth->values()[q]));
      }
    } catch (const Error& e) {
      c.issue = fmt::format("{}: {}", cell_name(c.model, var, ctx.inits[c.init], c.lead), e.what());
    }
  });

  std::map<ModelLeadKey, TailAccumulator> acc;
  for (const auto& c : cells) {
    if (!c.issue.empty()) ctx.issues.push_back(c.issue);
    if (!c.ok) continue;
    const ModelLeadKey key{c.model, c.lead};
    auto& e = out[key];
    auto& a = acc.try_emplace(key, opt).first->second;
    if (!std::isnan(c.ees)) e.ees.push_back(c.ees);
    for (const auto& [d, b] : c.samples) a.add_sample(d, b);
    e.points += c.samples.size();
  }
  for (auto& [key, e] : out) {
    try {
      e.curve = acc.at(key).curve();
    } catch (const Error& err) {
      ctx.issues.push_back(fmt::format("extremes {} +{}h: {}", key.first, key.second, err.what()));
    }
  }
  return out;
}

void write_extremes(const Context& ctx, const std::map<ModelLeadKey, ExtremesEntry>& ext, RunSummary& summary) {
  CsvTable bins({"model", "lead_hours", "bin_center", "mean_delta", "mean_bias", "count"});
  CsvTable summ({"model", "lead_hours", "alpha", "r2", "ees", "n_points"});
  for (const auto& [key, e] : ext) {
    const long long lead = key.second;
    if (e.curve) {
      for (std::size_t b = 0; b < e.curve->bin_center.size(); ++b) {
        if (e.curve->count[b] == 0) continue;
        bins.add_row({key.first, lead, e.curve->bin_center[b], e.curve->mean_delta[b], e.curve->mean_bias[b],
                      static_cast<long long>(e.curve->count[b])});
      }
    }
    summ.add_row({key.first, lead, e.curve ? e.curve->alpha : kNaN, e.curve ? e.curve->r2 : kNaN, mean_or_nan(e.ees),
                  static_cast<long long>(e.points)});
  }
  const auto& dir = ctx.cfg.output_dir;
  write_csv(dir / "tail_bins.csv", bins, ctx.cfg.seed);
  write_csv(dir / "extremes_summary.csv", summ, ctx.cfg.seed);
  summary.outputs.insert(summary.outputs.end(), {dir / "tail_bins.csv", dir / "extremes_summary.csv"});
}

// ---------------------------------------------------------------------------
// HMAS

void write_hmas(Context& ctx, const std::map<SpectralKey, SpectralEntry>& spectra,
                const std::map<std::string, DynamicsEntry>& dyn, const std::map<ModelLeadKey, BalanceEntry>& bal,
                const std::map<ModelLeadKey, ExtremesEntry>& ext, RunSummary& summary) {
  std::vector<int> leads = ctx.cfg.hmas_leads;
  if (leads.empty()) {
    for (int l : ctx.leads) {
      if (l > 0) leads.push_back(l);
    }
  }
  const auto& dir = ctx.cfg.output_dir;
  const auto scheme = default_scheme();
  ojson doc;
  doc["seed"] = ctx.cfg.seed;
  doc["metrics"] = kHmasMetricNames;
  doc["weights"] = scheme.weights;
  doc["tables"] = ojson::array();
  CsvTable sens({"lead_hours", "scheme", "model", "hmas", "rank"});

  for (int lead : leads) {
    std::vector<HmasRecord> records;
    for (const auto& m : ctx.models) {
      auto sp = spectra.find({ctx.cfg.spectral_variable, m, lead});
      auto dy = dyn.find(m);
      auto ba = bal.find({m, lead});
      auto ex = ext.find({m, lead});
      std::vector<std::string> missing;
      if (sp == spectra.end() || std::isnan(sp->second.sfi)) missing.push_back("spectra");
      if (dy == dyn.end() || !dy->second.growth) missing.push_back("growth");
      if (dy == dyn.end() || !dy->second.drift) missing.push_back("ke drift");
      if (ba == bal.end() || ba->second.reports.empty()) missing.push_back("balance");
      if (ex == ext.end() || ex->second.ees.empty()) missing.push_back("ees");
      if (!missing.empty()) {
        std::string what;
        for (const auto& s : missing) what += (what.empty() ? "" : ", ") + s;
        ctx.issues.push_back(fmt::format("hmas {} +{}h: missing {}", m, lead, what));
        continue;
      }
      const MetricVector metrics{sp->second.sfi,         sp->second.l_eff.normalized,
                                 dy->second.growth->tau_d_norm, mean(ex->second.ees),
                                 balance_means(ba->second).composite, dy->second.drift->asi};
      try {
        records.push_back(make_hmas_record(m, lead, metrics, scheme));
      } catch (const Error& err) {
        ctx.issues.push_back(fmt::format("hmas {} +{}h: {}", m, lead, err.what()));
      }
    }
    if (records.empty()) continue;

    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].hmas > records[b].hmas; });
    ojson table;
    table["lead_hours"] = lead;
    table["rows"] = ojson::array();
    for (std::size_t idx : order) {
      const auto& r = records[idx];
      ojson row;
      row["model"] = r.model;
      for (std::size_t i = 0; i < kHmasMetrics; ++i) row[std::string(kHmasMetricNames[i])] = json_number(r.metrics[i]);
      row["hmas"] = json_number(r.hmas);
      table["rows"].push_back(std::move(row));
    }

    std::vector<std::vector<double>> points;
    for (const auto& r : records) points.emplace_back(r.metrics.begin(), r.metrics.end());
    ojson front = ojson::array();
    for (std::size_t i : pareto_front(points)) front.push_back(records[i].model);
    table["pareto_front"] = std::move(front);

    try {
      const auto s = weight_sensitivity(records, ctx.cfg.schemes);
      for (std::size_t k = 0; k < s.schemes.size(); ++k) {
        for (std::size_t m = 0; m < s.models.size(); ++m) {
          sens.add_row({static_cast<long long>(lead), s.schemes[k], s.models[m], s.scores[k][m], s.ranks[k][m]});
        }
      }
      table["kendall_w"] = json_number(s.kendall_w);
    } catch (const Error& err) {
      table["kendall_w"] = nullptr;
      ctx.issues.push_back(fmt::format("hmas +{}h sensitivity: {}", lead, err.what()));
    }

    try {
      const auto corr = metric_correlation(records);
      std::vector<std::string> cols{"metric"};
      for (auto n : kHmasMetricNames) cols.emplace_back(n);
      CsvTable ct(cols);
      for (std::size_t i = 0; i < kHmasMetrics; ++i) {
        std::vector<CsvCell> row{std::string(kHmasMetricNames[i])};
        for (std::size_t j = 0; j < kHmasMetrics; ++j) row.emplace_back(corr.r[i][j]);
        ct.add_row(std::move(row));
      }
      const auto path = dir / fmt::format("hmas_correlation_{}.csv", lead_tag(lead));
      write_csv(path, ct, ctx.cfg.seed);
      summary.outputs.push_back(path);
      table["mean_abs_correlation"] = json_number(corr.mean_abs_offdiag);
    } catch (const Error& err) {
      ctx.issues.push_back(fmt::format("hmas +{}h correlation: {}", lead, err.what()));
    }
    doc["tables"].push_back(std::move(table));
  }
  write_json(dir / "hmas.json", doc);
  write_csv(dir / "hmas_sensitivity.csv", sens, ctx.cfg.seed);
  summary.outputs.insert(summary.outputs.end(), {dir / "hmas.json", dir / "hmas_sensitivity.csv"});
}

// ---------------------------------------------------------------------------
// SFS

void write_sfs(Context& ctx, RunSummary& summary) {
  const auto& sc = *ctx.cfg.sfs;
  struct Cell {
    std::size_t init;
    std::optional<ConditionalVarianceSpectrum> var;
    std::optional<Spectrum> truth;
    std::string issue;
  };
  std::vector<Cell> cells;
  for (std::size_t ii = 0; ii < ctx.inits.size(); ++ii) cells.push_back({ii, {}, {}, {}});
  parallel_for(cells.size(), ctx.cfg.workers, [&](std::size_t i) {
    auto& c = cells[i];
    const TimePoint init = ctx.inits[c.init];
    try {
      const auto truth = ctx.truth(sc.variable, add_hours(init, sc.lead_hours));
      std::vector<ScalarField> members;
      for (const auto& m : ctx.models) {
        if (auto f = ctx.forecast(m, sc.variable, init, sc.lead_hours)) members.push_back(std::move(*f));
      }
      if (!truth || members.size() < 2) {
        c.issue = fmt::format("sfs init {}: need verification and two forecasts", format_iso8601(init));
        return;
      }
      c.var = conditional_variance_spectrum(members);
      c.truth = isotropic_spectrum(*truth);
    } catch (const Error& e) {
      c.issue = fmt::format("sfs init {}: {}", format_iso8601(init), e.what());
    }
  });
  std::vector<Spectrum> vars, truths;
  for (auto& c : cells) {
    if (!c.issue.empty()) ctx.issues.push_back(c.issue);
    if (!c.var) continue;
    vars.push_back(c.var->variance);
    truths.push_back(*c.truth);
  }
  CsvTable table({"pipeline", "loss", "sfi_predicted", "coverage", "information", "sfs"});
  if (!vars.empty()) {
    const ConditionalVarianceSpectrum variance{mean_spectrum(vars), sc.lead_hours};
    const Spectrum truth = mean_spectrum(truths);
    // Evaluation samples: every verification value of each constrained variable.
    std::map<std::string, std::vector<double>> eval;
    for (const auto& p : sc.pipelines) {
      for (const auto& [var, range] : p.train_range) {
        if (eval.count(var)) continue;
        auto& values = eval[var];
        for (const auto& v : ctx.set.verifications()) {
          if (v.variable != var) continue;
          const auto f = read_wxg1(v.path).field;
          values.insert(values.end(), f.values().begin(), f.values().end());
        }
      }
    }
    for (const auto& p : sc.pipelines) {
      try {
        std::vector<CoverageInput> cov;
        for (const auto& [var, range] : p.train_range) cov.push_back({range.first, range.second, eval[var]});
        const auto t = sfs(p.loss, variance, truth, cov, p.h_ks, p.i0, sc.lead_hours / 24.0, sc.weights);
        table.add_row({p.name, std::string(to_string(p.loss)), t.sfi_predicted, t.coverage, t.information, t.sfs});
      } catch (const Error& err) {
        ctx.issues.push_back(fmt::format("sfs {}: {}", p.name, err.what()));
      }
    }
  }
  const auto path = ctx.cfg.output_dir / "sfs.csv";
  write_csv(path, table, ctx.cfg.seed);
  summary.outputs.push_back(path);
}

// ---------------------------------------------------------------------------

std::vector<std::string> select(const std::vector<std::string>& available, const std::vector<std::string>& wanted,
                                const char* what) {
  if (wanted.empty()) return available;
  std::vector<std::string> out;
  for (const auto& w : wanted) {
    if (std::find(available.begin(), available.end(), w) == available.end()) {
      throw Error(ErrorKind::ConfigError, fmt::format("unknown {} '{}'", what, w));
    }
    out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void build_context(Context& ctx) {
  const auto root = effective_data_root(ctx.cfg);
  ctx.set = load_forecast_set(ctx.cfg.forecast_manifest, ctx.cfg.verification_manifest, root);
  if (ctx.cfg.climatology_manifest) ctx.clims = load_climatologies(*ctx.cfg.climatology_manifest, root);
  ctx.models = select(ctx.set.models(), ctx.cfg.models, "model");
  ctx.variables = select(ctx.set.variables(), ctx.cfg.variables, "variable");
  ctx.inits = ctx.set.init_times();

  // Leads shared by the selected models.
  std::vector<int> common;
  for (std::size_t i = 0; i < ctx.models.size(); ++i) {
    const auto l = ctx.set.leads(ctx.models[i]);
    if (i == 0) {
      common = l;
    } else {
      std::vector<int> keep;
      std::set_intersection(common.begin(), common.end(), l.begin(), l.end(), std::back_inserter(keep));
      common.swap(keep);
    }
  }
  if (ctx.cfg.leads.empty()) {
    ctx.leads = common;
  } else {
    for (int l : ctx.cfg.leads) {
      if (std::find(common.begin(), common.end(), l) == common.end()) {
        throw Error(ErrorKind::ConfigError, fmt::format("lead {}h is not shared by all selected models", l));
      }
    }
    ctx.leads = ctx.cfg.leads;
    std::sort(ctx.leads.begin(), ctx.leads.end());
    ctx.leads.erase(std::unique(ctx.leads.begin(), ctx.leads.end()), ctx.leads.end());
  }
}

}  // namespace

std::vector<std::string> validate(const RunConfig& config) {
  std::vector<std::string> findings;
  for (const auto& [label, path] : {std::pair{"forecast manifest", config.forecast_manifest},
                                    std::pair{"verification manifest", config.verification_manifest}}) {
    if (!fs::exists(path)) findings.push_back(fmt::format("{} not found: {}", label, path.string()));
  }
  const bool needs_clim = config.stages.count(Stage::extremes) || config.stages.count(Stage::hmas);
  if (config.climatology_manifest) {
    if (!fs::exists(*config.climatology_manifest)) {
      findings.push_back(fmt::format("climatology manifest not found: {}", config.climatology_manifest->string()));
    }
  } else if (needs_clim) {
    findings.push_back("extremes (EES) selected but no climatology manifest configured");
  }
  if (!findings.empty()) return findings;

  Context ctx(config);
  try {
    build_context(ctx);
  } catch (const Error& e) {
    findings.push_back(e.what());
    return findings;
  }
  for (auto& f : ctx.set.check()) findings.push_back(std::move(f));
  for (const auto& e : ctx.set.forecasts()) {
    if (!fs::exists(e.path)) findings.push_back(fmt::format("missing file {}", e.path.string()));
  }
  for (const auto& e : ctx.set.verifications()) {
    if (!fs::exists(e.path)) findings.push_back(fmt::format("missing file {}", e.path.string()));
  }

  std::set<std::string> required;
  if (config.stages.count(Stage::balance) || config.stages.count(Stage::hmas)) {
    for (const char* v : {"u500", "v500", "u850", "v850", "z500", "z850", "t850"}) required.insert(v);
  }
  if (config.stages.count(Stage::dynamics) || config.stages.count(Stage::hmas)) {
    required.insert(config.growth_variable);
    required.insert("u" + config.ke_level);
    required.insert("v" + config.ke_level);
  }
  if (config.stages.count(Stage::extremes) || config.stages.count(Stage::hmas)) {
    required.insert(config.extremes_variable);
    if (!ctx.climatology(config.extremes_variable)) {
      findings.push_back(fmt::format("climatology has no entries for {}", config.extremes_variable));
    }
  }
  if (config.stages.count(Stage::spectra) || config.stages.count(Stage::hmas)) required.insert(config.spectral_variable);
  if (config.stages.count(Stage::sfs)) {
    if (!config.sfs) {
      findings.push_back("sfs selected but the config has no sfs block");
    } else {
      required.insert(config.sfs->variable);
    }
  }
  for (const auto& model : ctx.models) {
    for (const auto& var : required) {
      bool any = false;
      for (const auto& e : ctx.set.forecasts()) {
        if (e.model == model && e.variable == var) {
          any = true;
          break;
        }
      }
      if (!any) findings.push_back(fmt::format("model {} has no {} forecasts", model, var));
    }
  }
  return findings;
}

RunSummary run(const RunConfig& config) {
  RunSummary summary;
  if (config.stages.empty()) {
    summary.issues.push_back("no stages selected; nothing to do");
    return summary;
  }
  Context ctx(config);
  build_context(ctx);
  fs::create_directories(config.output_dir);

  const auto has = [&](Stage s) { return config.stages.count(s) > 0; };
  const bool hmas = has(Stage::hmas);

  std::map<SpectralKey, SpectralEntry> spectra;
  if (has(Stage::spectra) || hmas) {
    auto vars = has(Stage::spectra) ? ctx.variables : std::vector<std::string>{};
    if (hmas && std::find(vars.begin(), vars.end(), config.spectral_variable) == vars.end()) {
      vars.push_back(config.spectral_variable);
    }
    spectra = compute_spectra(ctx, vars);
    if (has(Stage::spectra)) write_spectra(ctx, spectra, summary);
  }

  std::map<SkillKey, SkillEntry> skill;
  if (has(Stage::skill) || has(Stage::dynamics) || hmas) {
    auto vars = has(Stage::skill) ? ctx.variables : std::vector<std::string>{};
    if ((has(Stage::dynamics) || hmas) &&
        std::find(vars.begin(), vars.end(), config.growth_variable) == vars.end()) {
      vars.push_back(config.growth_variable);
    }
    skill = compute_skill(ctx, vars);
    if (has(Stage::skill)) write_skill(ctx, skill, summary);
  }

  if (has(Stage::consensus)) write_consensus(ctx, compute_consensus(ctx, ctx.variables), summary);

  std::map<std::string, DynamicsEntry> dyn;
  if (has(Stage::dynamics) || hmas) {
    dyn = compute_dynamics(ctx, rmse_by_lead(skill, config.growth_variable));
    if (has(Stage::dynamics)) write_dynamics(ctx, dyn, summary);
  }

  std::map<ModelLeadKey, BalanceEntry> bal;
  if (has(Stage::balance) || hmas) {
    bal = compute_balance(ctx);
    if (has(Stage::balance)) write_balance(ctx, bal, summary);
  }

  std::map<ModelLeadKey, ExtremesEntry> ext;
  if (has(Stage::extremes) || hmas) {
    ext = compute_extremes(ctx);
    if (has(Stage::extremes)) write_extremes(ctx, ext, summary);
  }

  if (hmas) write_hmas(ctx, spectra, dyn, bal, ext, summary);

  if (has(Stage::sfs)) {
    if (!config.sfs) throw Error(ErrorKind::ConfigError, "sfs stage needs an sfs block in the config");
    write_sfs(ctx, summary);
  }

  summary.issues = std::move(ctx.issues);
  std::string text;
  for (const auto& i : summary.issues) text += i + "\n";
  write_text(config.output_dir / "issues.txt", text);
  summary.outputs.push_back(config.output_dir / "issues.txt");
  return summary;
}

}  // namespace wxdiag
