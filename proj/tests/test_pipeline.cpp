#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wxdiag/error.hpp"
#include "wxdiag/io.hpp"
#include "wxdiag/pipeline.hpp"
#include "wxdiag/synth.hpp"

namespace wxdiag {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_dataset(const fs::path& dir) {
  SyntheticDatasetOptions o;
  o.nlat = 24;
  o.nlon = 48;
  o.inits = 2;
  o.max_lead_hours = 96;
  return load_config(write_synthetic_dataset(dir, o));
}

bool mentions(const std::vector<std::string>& findings, std::initializer_list<const char*> words) {
  for (const auto& f : findings) {
    bool all = true;
    for (const char* w : words) all = all && f.find(w) != std::string::npos;
    if (all) return true;
  }
  return false;
}

TEST(Config, ParsesAndResolvesPaths) {
  const auto c = parse_config(R"({"forecast_manifest": "fc.json", "verification_manifest": "/abs/v.json",
                                  "stages": ["skill", "spectra"], "workers": 4, "seed": 9})",
                              "/base");
  EXPECT_EQ(c.forecast_manifest, fs::path("/base/fc.json"));
  EXPECT_EQ(c.verification_manifest, fs::path("/abs/v.json"));
  EXPECT_EQ(c.stages, (std::set<Stage>{Stage::skill, Stage::spectra}));
  EXPECT_EQ(c.workers, 4u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(parse_stage("hmas"), Stage::hmas);
  EXPECT_EQ(default_stages().count(Stage::sfs), 0u);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"[]", "{", R"({"forecast_manifest": "a"})",
                           R"({"forecast_manifest": "a", "verification_manifest": "b", "workers": 0})",
                           R"({"forecast_manifest": "a", "verification_manifest": "b", "stages": ["nope"]})",
                           R"({"forecast_manifest": "a", "verification_manifest": "b", "tail": {"tail": "hot"}})",
                           R"({"forecast_manifest": "a", "verification_manifest": "b",
                               "schemes": [{"name": "x", "weights": [1, 1, 0, 0, 0, 0]}]})"}) {
    EXPECT_THROW(parse_config(text), Error) << text;
  }
  EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
}

TEST(Validate, CleanDatasetHasNoFindings) {
  const auto c = small_dataset(testing::scratch_dir());
  EXPECT_EQ(validate(c), std::vector<std::string>{});
}

TEST(Validate, MissingClimatologyIsOneFinding) {
  auto c = small_dataset(testing::scratch_dir());
  c.climatology_manifest.reset();
  const auto findings = validate(c);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_TRUE(mentions(findings, {"climatology"}));
}

TEST(Validate, LeadMismatchNamesBothModels) {
  const auto c = small_dataset(testing::scratch_dir());
  auto m = read_manifest(c.forecast_manifest);
  const std::string dropped = m.entries.front().model;
  std::erase_if(m.entries, [&](const ManifestEntry& e) { return e.model == dropped && e.lead_hours == 96; });
  write_manifest(c.forecast_manifest, m);
  const auto findings = validate(c);
  std::string other;
  for (const auto& [name, info] : m.models) {
    if (name != dropped) other = name;
  }
  EXPECT_TRUE(mentions(findings, {dropped.c_str(), other.c_str()}));
  // The run still proceeds on the common leads.
  auto quick = c;
  quick.stages = {Stage::skill};
  EXPECT_NO_THROW(run(quick));
}

TEST(Validate, DataDirEnvironmentOverridesRoot) {
  const auto c = small_dataset(testing::scratch_dir());
  ::setenv("WXDIAG_DATA_DIR", "/nonexistent-wxdiag-root", 1);
  const auto findings = validate(c);
  ::unsetenv("WXDIAG_DATA_DIR");
  ASSERT_FALSE(findings.empty());
  EXPECT_TRUE(mentions(findings, {"/nonexistent-wxdiag-root"})) << findings.front();
}

TEST(Run, OutputsDoNotDependOnWorkers) {
  const auto dir = testing::scratch_dir();
  auto c = small_dataset(dir);
  c.output_dir = dir / "w1";
  c.workers = 1;
  const auto a = run(c);
  c.output_dir = dir / "w3";
  c.workers = 3;
  const auto b = run(c);
  ASSERT_EQ(a.outputs.size(), b.outputs.size());
  EXPECT_GE(a.outputs.size(), 10u);
  EXPECT_EQ(a.issues, b.issues);
  for (std::size_t i = 0; i < a.outputs.size(); ++i) {
    EXPECT_EQ(a.outputs[i].filename(), b.outputs[i].filename());
    EXPECT_EQ(read_file(a.outputs[i]), read_file(b.outputs[i])) << a.outputs[i];
  }
}

TEST(Run, EmptyStageSetIsANoOp) {
  const auto dir = testing::scratch_dir();
  auto c = small_dataset(dir);
  c.stages.clear();
  c.output_dir = dir / "none";
  const auto s = run(c);
  EXPECT_TRUE(s.outputs.empty());
  ASSERT_EQ(s.issues.size(), 1u);
  EXPECT_NE(s.issues[0].find("nothing to do"), std::string::npos);
}

}  // namespace
}  // namespace wxdiag
