#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vkoga_ie/pipeline.hpp"

namespace vkoga_ie {

struct OnlineConfig {
  std::vector<Vector> params;
  std::vector<double> dts;
  double horizon = 2.0;
  int repetitions = 1;

  // Cross product params x dts.
  std::vector<TestCase> cases() const;
};

struct OutputPaths {
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> cv;
};

struct ExperimentConfig {
  std::string name;
  OfflineConfig offline;
  OnlineConfig online;
  OutputPaths output;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void validate() const;
};

// Nested key-value text (YAML syntax). Test parameters are either a list under
// online.params or a tensor grid under online.param_grid {center, step, offsets};
// timesteps are a list under online.dt or online.dt_log {lo, hi, count,
// snap_to_horizon}; snapping replaces each dt by horizon / round(horizon / dt).
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// count log-spaced values from lo to hi with exact endpoints.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace vkoga_ie
