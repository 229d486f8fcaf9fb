#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wxdiag/balance.hpp"
#include "wxdiag/composite.hpp"
#include "wxdiag/extremes.hpp"

namespace wxdiag {

enum class Stage { spectra, skill, consensus, dynamics, balance, extremes, hmas, sfs };

std::string_view to_string(Stage stage) noexcept;
Stage parse_stage(std::string_view name);
/// Every stage except sfs, which needs its own config block.
std::set<Stage> default_stages();

/// One candidate training pipeline scored by the sfs stage.
struct SfsPipeline {
  std::string name;
  LossFamily loss = LossFamily::mse;
  double h_ks = 0.0;  ///< per day
  double i0 = 1.0;    ///< bits
  /// Training support per variable; evaluation samples are the verification
  /// fields of that variable.
  std::map<std::string, std::pair<double, double>> train_range;
};

struct SfsConfig {
  std::string variable = "z500";
  int lead_hours = 120;
  SfsWeights weights;
  std::vector<SfsPipeline> pipelines;
};

struct RunConfig {
  std::filesystem::path forecast_manifest;
  std::filesystem::path verification_manifest;
  std::optional<std::filesystem::path> climatology_manifest;
  /// Root for relative paths inside manifests (WXDIAG_DATA_DIR overrides).
  std::optional<std::filesystem::path> data_root;
  std::filesystem::path output_dir = "wxdiag-out";

  std::vector<std::string> variables;  ///< empty: all
  std::vector<std::string> models;     ///< empty: all
  std::vector<int> leads;              ///< empty: all common leads
  std::set<Stage> stages = default_stages();
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  std::string spectral_variable = "z500";
  std::string growth_variable = "z500";
  std::string extremes_variable = "t2m";
  std::string ke_level = "500";
  /// Leads with an HMAS table; empty: every positive common lead.
  std::vector<int> hmas_leads;

  double lyapunov_day_lo = 1.0;
  double lyapunov_day_hi = 5.0;
  /// ASI window in days; empty: the largest common lead.
  std::optional<double> asi_window_days;
  TailOptions tail;
  BalanceNormalizers normalizers;
  PhysicalConstants constants;
  std::vector<WeightScheme> schemes = standard_schemes();
  std::optional<SfsConfig> sfs;
};

/// Parses a JSON config; relative manifest and output paths resolve against
/// the config file's directory. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});

/// Human-readable problems found without running anything: missing files,
/// variable gaps for the selected stages, lead mismatches between models.
std::vector<std::string> validate(const RunConfig& config);

struct RunSummary {
  std::vector<std::filesystem::path> outputs;
  /// Cells skipped because of missing or invalid data, in a fixed order.
  std::vector<std::string> issues;
};

/// Runs the selected stages and writes their reports to config.output_dir.
/// Structural problems (unreadable manifests, bad config) throw; missing
/// fields only skip their cell and are listed in the summary.
RunSummary run(const RunConfig& config);

}  // namespace wxdiag
