// wxdiag command-line driver.
//
// Exit codes: 0 success, 1 validation findings, 2 structural error (bad
// config, unreadable manifest), plus CLI11's own codes for bad arguments.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wxdiag/error.hpp"
#include "wxdiag/pipeline.hpp"
#include "wxdiag/synth.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::vector<std::string> vars;
  std::vector<int> leads;
  std::vector<std::string> models;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> stages;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run config")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", o.out, "output directory (overrides the config)");
  cmd->add_option("--vars", o.vars, "comma-separated variables")->delimiter(',');
  cmd->add_option("--leads", o.leads, "comma-separated lead hours")->delimiter(',');
  cmd->add_option("--models", o.models, "comma-separated models")->delimiter(',');
  cmd->add_option("-j,--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "seed recorded in report headers");
}

wxdiag::RunConfig resolve(const Overrides& o) {
  auto cfg = wxdiag::load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.vars.empty()) cfg.variables = o.vars;
  if (!o.leads.empty()) cfg.leads = o.leads;
  if (!o.models.empty()) cfg.models = o.models;
  if (o.workers) cfg.workers = *o.workers;
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

int report(const wxdiag::RunSummary& summary) {
  for (const auto& issue : summary.issues) fmt::print(stderr, "warning: {}\n", issue);
  for (const auto& path : summary.outputs) fmt::print("{}\n", path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagnostics for gridded weather forecasts against a verifying analysis"};
  app.require_subcommand(1);

  Overrides o;
  std::optional<wxdiag::Stage> single_stage;
  for (auto stage : {wxdiag::Stage::spectra, wxdiag::Stage::skill, wxdiag::Stage::consensus,
                     wxdiag::Stage::dynamics, wxdiag::Stage::balance, wxdiag::Stage::extremes,
                     wxdiag::Stage::hmas, wxdiag::Stage::sfs}) {
    auto* cmd = app.add_subcommand(std::string(wxdiag::to_string(stage)),
                                   fmt::format("run the {} stage only", wxdiag::to_string(stage)));
    add_common_flags(cmd, o);
    cmd->callback([&single_stage, stage] { single_stage = stage; });
  }

  auto* run_cmd = app.add_subcommand("run", "run several stages (default: all but sfs)");
  add_common_flags(run_cmd, o);
  run_cmd->add_option("--stages", o.stages, "comma-separated stages; empty runs nothing")->delimiter(',');

  auto* validate_cmd = app.add_subcommand("validate", "list problems with a config without running it");
  add_common_flags(validate_cmd, o);

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset with manifests and a config");
  std::string synth_out;
  wxdiag::SyntheticDatasetOptions synth_opts;
  synth_cmd->add_option("-o,--out", synth_out, "dataset directory")->required();
  synth_cmd->add_option("--seed", synth_opts.seed, "generator seed");
  synth_cmd->add_option("--nlat", synth_opts.nlat, "latitude rows")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--nlon", synth_opts.nlon, "longitude columns")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--inits", synth_opts.inits, "initialisation dates")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--max-lead", synth_opts.max_lead_hours, "last lead in hours");
  synth_cmd->add_option("--lead-step", synth_opts.lead_step_hours, "lead spacing in hours")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      const auto config = wxdiag::write_synthetic_dataset(synth_out, synth_opts);
      fmt::print("{}\n", config.string());
      return 0;
    }
    auto cfg = resolve(o);
    if (validate_cmd->parsed()) {
      const auto findings = wxdiag::validate(cfg);
      for (const auto& f : findings) fmt::print("{}\n", f);
      return findings.empty() ? 0 : 1;
    }
    if (single_stage) {
      cfg.stages = {*single_stage};
    } else if (run_cmd->count("--stages")) {
      cfg.stages.clear();
      for (const auto& s : o.stages) {
        if (!s.empty()) cfg.stages.insert(wxdiag::parse_stage(s));
      }
    }
    return report(wxdiag::run(cfg));
  } catch (const wxdiag::Error& e) {
    fmt::print(stderr, "error ({}): {}\n", wxdiag::to_string(e.kind()), e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
