#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "wxdiag/grid.hpp"

namespace wxdiag::testing {

inline GridPtr make_grid(std::size_t nlat, std::size_t nlon) {
  return std::make_shared<const LatLonGrid>(LatLonGrid::regular(nlat, nlon));
}

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double sd = 1.0, double offset = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(offset, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

inline ScalarField random_field(const GridPtr& grid, std::uint64_t seed, double sd = 1.0, double offset = 0.0) {
  return ScalarField(grid, random_values(grid->size(), seed, sd, offset));
}

/// Fresh directory under the system temp dir, named after the running test.
inline std::filesystem::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = std::filesystem::temp_directory_path() / "wxdiag-tests" /
             (std::string(info->test_suite_name()) + "." + info->name());
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace wxdiag::testing
